"""Which small orthogonal groups Omega(V) consist entirely of bireflectional elements?

Enumerates O(V) for each small cell, computes Omega as the commutator
subgroup, and compares the brute-force answer with the whole-group conditions
"q = 1 mod 4 and dim V != 2 mod 4" or "dim V = 0 mod 4 and disc V = -1".
The dim-2 cells with |Omega| <= 2 are vacuously all-bireflectional.
"""

from biref.algebra import NONSQUARE, SQUARE, class_of_minus_one, field_make
from biref.oracle import closure, commutator_subgroup, exhaustive_classify
from biref.space import BilinearSpace, witt_index

print(f"{'q':>2} {'dim':>3} {'disc':>9} {'|O|':>7} {'|Omega|':>7} {'Wind':>4} {'all biref':>9} {'condition':>9}")
for q in (3, 5):
    F = field_make(q)
    for n in (2, 3, 4):
        for d in (SQUARE, NONSQUARE):
            S = BilinearSpace.standard(F, n, d)
            T = closure(S)
            om = commutator_subgroup(T)
            certs = exhaustive_classify(T, om)
            all_true = all(c.biref_Omega for c in certs if c.biref_Omega is not None)
            cond = (q % 4 == 1 and n % 4 != 2) or (n % 4 == 0 and d is class_of_minus_one(F))
            flag = "" if all_true == cond else "  <- |Omega| <= 2"
            print(f"{q:>2} {n:>3} {d.name.lower():>9} {T.order:>7} {int(om.sum()):>7} {witt_index(S):>4} "
                  f"{str(all_true):>9} {str(cond):>9}{flag}")
