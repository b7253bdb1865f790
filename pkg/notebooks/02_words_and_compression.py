# %% [markdown]
# # Presentations, defects and compression

# %%
import numpy as np

from almostrep import catalog_rep, compress, defect, direct_sum, evaluate_word, pair_defect, perturb

pres, rep = catalog_rep("quaternion8_irrep")
print("relators:", [r.to_json() for r in pres.relators])
print("J =", pres.central_marking.to_json())
print("phi(J) =\n", np.round(evaluate_word(rep, pres.central_marking), 12))

# %% [markdown]
# An exact representation has zero defect. Perturbing each generator by
# exp(eps K) gives an almost-representation whose defect grows linearly.

# %%
for eps in (0.0, 1e-3, 1e-2, 1e-1):
    r = perturb(rep, eps, seed=1)
    print(f"eps={eps:<6} defect_op={defect(r, pres, 'op'):.2e}  "
          f"pair defect (radius 2)={pair_defect(r, pres, 2, 'op'):.2e}")

# %% [markdown]
# ## Compressing a direct sum onto one block
#
# For an exact direct sum the block projection commutes with everything,
# so compression recovers the first summand. After perturbation each step
# of the argument is recorded as a certificate.

# %%
big = perturb(direct_sum(rep, rep), 1e-2, seed=2)
P = np.diag([1, 1, 0, 0]).astype(float)
psi, report = compress(big, P, pres, "schatten-2")
print("commutators ||[phi(g), P]||:", np.round(report.per_generator_commutator, 5))
print("relator defects before:", np.round(report.per_relator_before, 5))
print("relator defects after: ", np.round(report.per_relator_after, 5))
print(f"{len(report.inequality_certificates)} certificates, all hold: {report.satisfied}")
for c in report.inequality_certificates[:4]:
    print(f"  {c.lhs:.3e} <= {c.rhs:.3e}  {c.anchor}")
