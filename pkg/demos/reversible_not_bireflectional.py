"""A reversible element of Omega(V) that is not a product of two involutions of Omega(V).

Over GF(3) take a fixed plane of discriminant +1 next to a 4-dimensional
unipotent block with elementary divisors (x-1)^2, (x-1)^2.  The predicates say
"reversible, not bireflectional"; the centraliser-coset oracle counts every
reverser and checks which ones are involutions lying in Omega.
"""

import time

from biref.classify import classify
from biref.linalg import eye, matmul
from biref.oracle import element_certificate
from biref.ortho import Isometry, orthogonal_decompose, reversers, rprofile_example

S, phi = rprofile_example(3)
print("Gram matrix:\n", S.gram)
print("phi:\n", phi.matrix)
print("elementary divisors:", phi.elementary_divisors().to_json())
print("summands:", [(s.tag, s.dim, s.disc.name.lower()) for s in orthogonal_decompose(phi).summands])

v = classify(phi)
print(f"\npredicates: C1={v.C1} C2={v.C2} C3={v.C3} r_profile={v.r_profile}")
print(f"            biref_Omega={v.biref_Omega} reversible_Omega={v.reversible_Omega}")

t = time.time()
cert = element_certificate(phi)
print(f"\noracle ({time.time() - t:.1f}s): |Cent_O(phi)| = {cert.centralizer_order}, "
      f"{cert.reversers} reversers, {cert.involutive_reversers} of them involutions")
print(f"            biref_Omega={cert.biref_Omega} reversible_Omega={cert.reversible_Omega}")
assert (cert.biref_Omega, cert.reversible_Omega) == (v.biref_Omega, v.reversible_Omega)

# every involutive reverser misses Omega through its determinant or its spinor norm
R = reversers(phi)
inv = R[(matmul(S.field, R, R) == eye(6)).all(axis=(1, 2))]
labels = {}
for X in inv:
    g = Isometry(S, X, validate=False)
    key = (1 if g.det == 1 else -1, g.spinor_norm.name.lower())
    labels[key] = labels.get(key, 0) + 1
print("\n(det, spinor norm) of involutive reversers:", labels)
