# %% [markdown]
# # Norms and matrix corrections
#
# All norms here are unitarily invariant and computed from singular values.

# %%
import numpy as np

from almostrep import haar_unitary, nearest_involution, nearest_kth_root, nearest_unitary, norm
from almostrep.linalg import gaussian_matrix

rng = np.random.default_rng(0)
A = gaussian_matrix(5, rng)
for idx in ("schatten-1", "schatten-1.5", "fro", "schatten-3", "op", "hs"):
    print(f"{idx:>13}: {norm(A, idx):.4f}")

# %% [markdown]
# Schatten norms decrease in p, and the normalised HS norm sits below the
# operator norm.

# %%
ps = np.linspace(1, 8, 15)
vals = [norm(A, p) for p in ps]
print(np.all(np.diff(vals) <= 1e-12), norm(A, "hs") <= norm(A, "op"))

# %% [markdown]
# ## Nearest unitary
#
# The polar factor of a perturbed unitary moves it back by no more than its
# unitarity defect.

# %%
U = haar_unitary(5, rng)
M = U + 0.05 * gaussian_matrix(5, rng)
R, cert = nearest_unitary(M, "schatten-1")
print(f"||M - R||_1 = {cert.lhs:.4f}  <=  ||M*M - 1||_1 = {cert.rhs:.4f}")
print("R unitary:", np.allclose(R.conj().T @ R, np.eye(5)))

# %% [markdown]
# ## Nearest involution and roots of unity

# %%
S = np.diag([1, 1, -1, -1, -1]).astype(complex)
V = haar_unitary(5, rng)
A2 = V @ S @ V.conj().T @ (np.eye(5) + 0.02j * np.diag(rng.standard_normal(5)))
A2, _ = nearest_unitary(A2)
B, cert = nearest_involution(A2, "op")
print("eigenvalues of B:", np.round(np.linalg.eigvalsh(B), 12))
print(f"||B - A|| = {cert.lhs:.4f} <= ||1 - A^2|| = {cert.rhs:.4f}")

W = np.diag(np.exp(2j * np.pi * np.array([0.02, 0.24, 0.51, 0.77, 0.98])))
C, _ = nearest_kth_root(W, 4)
print("fourth roots:", np.round(np.diag(C), 12))
print("C^4 = 1:", np.allclose(np.linalg.matrix_power(C, 4), np.eye(5)))
