"""Spinor norms three ways on O(4) over GF(5).

1. product of the norms f(v, v) of a reflection factorisation;
2. the same with a different (seeded) factorisation;
3. for involutions, the discriminant of the image of sigma - 1.
"""

import random

from biref.algebra import NONSQUARE, SquareClass, field_make, square_class
from biref.linalg import eye, image
from biref.ortho import random_isometry, reflection_factors
from biref.space import BilinearSpace, gram_class

F = field_make(5)
S = BilinearSpace.standard(F, 4, NONSQUARE)
rng = random.Random(0)

agree = 0
for i in range(200):
    phi = random_isometry(S, rng)
    a = SquareClass.product(square_class(F, S.q(v)) for v in reflection_factors(phi))
    b = SquareClass.product(square_class(F, S.q(v)) for v in reflection_factors(phi, rng=random.Random(i)))
    agree += a is b
print(f"two factorisations agree on {agree}/200 random isometries")

seen = 0
for _ in range(2000):
    sig = random_isometry(S, rng)
    if sig.is_identity() or not sig.power(2).is_identity():
        continue
    bahn = image(F, F.sub[sig.matrix, eye(4)])
    assert sig.spinor_norm is gram_class(F, S.gram_of(bahn))
    seen += 1
print(f"Theta(sigma) = disc Bahn(sigma) on {seen} random involutions")
