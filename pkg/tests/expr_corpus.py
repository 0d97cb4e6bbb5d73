"""Expression corpus shared by the parser tests and the acceptance suite.

Values use x = 0.5, y1 = 1.25, y2 = -2 and were worked out by hand (the
transcendental ones to 50 digits, then rounded to the nearest double).
"""

POINT = (0.5, (1.25, -2.0))

VALID = [
    ("2 + 3 * 4", 14.0),
    ("(2 + 3) * 4", 20.0),
    ("2 ^ 3 ^ 2", 512.0),
    ("-2 ^ 2", -4.0),
    ("(-2) ^ 2", 4.0),
    ("10 - 4 - 3", 3.0),
    ("64 / 4 / 2", 8.0),
    ("2 * -3", -6.0),
    ("--3", 3.0),
    ("1.5e2 + 2.5E-1", 150.25),
    (".5 + 1.", 1.5),
    ("x", 0.5),
    ("y1 - 2 * x / y1", 0.45),
    ("y1 * y2 + x", -2.0),
    ("sin(x)", 0.479425538604203),
    ("cos(x)", 0.8775825618903728),
    ("tan(x)", 0.5463024898437905),
    ("exp(x)", 1.6487212707001282),
    ("ln(y1)", 0.22314355131420976),
    ("sqrt(y1)", 1.118033988749895),
    ("abs(y2)", 2.0),
    ("x ^ 2 + y1 ^ 2", 1.8125),
    ("2 ^ (x + 1)", 2.8284271247461903),
    ("y1 ^ 0.5", 1.118033988749895),
    ("-x ^ 2", -0.25),
    ("(1 + x) / (1 - x)", 3.0),
    ("3 * (y2 + 4) ^ 2 / 6", 2.0),
    ("sqrt(abs(y2) * 8)", 4.0),
    ("exp(-y1 * x)", 0.5352614285189903),
    ("1 / 3", 0.3333333333333333),
    ("2 ^ (-1)", 0.5),
    ("4 - -x", 4.5),
    ("ln(exp(2))", 2.0),
    ("x*y1*y2", -1.25),
    ("  7  ", 7.0),
]

# text, error class name, expected character offset
MALFORMED = [
    ("y1 + sin(", "ExprSyntaxError", 9),
    ("2 +", "ExprSyntaxError", 3),
    ("(1 + 2", "ExprSyntaxError", 6),
    ("1 + * 2", "ExprSyntaxError", 4),
    ("2 ^ -1", "ExprSyntaxError", 4),
    ("2 ^ x", "ExprSyntaxError", 4),
    ("1 2", "ExprSyntaxError", 2),
    (")", "ExprSyntaxError", 0),
    ("3 $ 4", "ExprSyntaxError", 2),
    ("", "ExprSyntaxError", 0),
    ("sin x", "ExprSyntaxError", 4),
    ("x + (y1 * 2))", "ExprSyntaxError", 12),
    ("foo(x)", "UnknownIdentifierError", 0),
    ("x + z", "UnknownIdentifierError", 4),
]
