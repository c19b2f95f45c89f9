"""Twenty identities in the DSL, used by the round-trip and checker tests."""

GOLDEN = [
    # distributivity, as containment with a composition fixpoint
    "a & (b o c o b) <= (a & b) + c ; forall a, b, c: congruence",
    # the three-factor identity with parameter k
    "a & (b o c o b) <= (a & b) o[k] c ; forall a, b, c: congruence ; param k",
    # shifted variant
    "a & (b o c o b) <= b o[k] (a & c) ; forall a, b, c: congruence ; param k",
    # representable tolerance in the middle
    "a & (D o c o D) <= (a & D) o[k] c ; forall a: congruence ; "
    "forall D: representable ; forall c: congruence ; param k",
    # longer alternating chain on the left, fixed bound on the right
    "a & (b o[7] c) <= (a & b) o[8] c ; forall a, b, c: congruence",
    "a & (b o[3] c) <= (a & b) o[5] (a & c) ; forall a, b, c: congruence",
    "a & (b o[h] c) <= (a & b) o[k] (a & c) ; forall a, b, c: congruence ; param h=3 ; param k",
    "a & (b + c) <= (a & b) + (a & c) ; forall a, b, c: congruence",
    "a & (b o c) <= (a & b) o (a & c) ; forall a, b, c: congruence",
    "(a & b) + (a & c) <= a & (b + c) ; forall a, b, c: congruence",
    "a o b <= b o a ; forall a, b: congruence",
    "a o b o a <= a + b ; forall a, b: congruence",
    "conv(a o b) <= conv(b) o conv(a) ; forall a, b: relation",
    "a & conv(a) <= a ; forall a: tolerance",
    "a o[k] b <= a + b ; forall a, b: congruence ; param k=4",
    "a & b o c <= (a & b) o c ; forall a, b, c: congruence",
    "a + b & c <= a + (b & c) ; forall a, b, c: congruence",
    "(a o b) o c <= a o (b o c) ; forall a, b, c: relation",
    "a o (b o c) <= a o b o c ; forall a, b, c: relation",
    "a & (b o (a & c)) <= (a & b) o (a & c) ; forall a, b, c: congruence",
]

MALFORMED = [
    ("a & (b o c <= a ; forall a, b, c: congruence", 1, 12),
    ("a <= ; forall a: congruence", 1, 6),
    ("a <= b ; forall a: congruence", 1, 6),
    ("a <= a ; forall a, a: congruence", 1, 20),
    ("a <= a ; forall a: lattice", 1, 20),
    ("a o[0] a <= a ; forall a: congruence", 1, 5),
    ("a o[k] a <= a ; forall a: congruence", 1, 5),
    ("a o[k] a <= a ; forall a: congruence ; param k ; param k", 1, 56),
    ("a <= a ; forall a: congruence ; param a", 1, 39),
    ("a <= k ; forall a: congruence ; param k", 1, 6),
    ("a <= a ; forall a: congruence ; param k=0", 1, 41),
    ("a <= a $ ; forall a: congruence", 1, 8),
    ("a <= a ; exists a: congruence", 1, 10),
    ("a & & b <= a ; forall a, b: congruence", 1, 5),
    ("a <= a ;\n forall a: congruence ;\n param", 3, 7),
    ("conv a <= a ; forall a: relation", 1, 6),
    ("a o[ <= a ; forall a: congruence", 1, 6),
    ("", 1, 1),
]
