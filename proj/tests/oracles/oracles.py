"""Independent oracles for the frozen expected values used in the C++ tests.

Everything here is computed either from closed forms or by brute force in a
large truncated Fock space with scipy's matrix exponential; none of it shares
code with the C++ implementation.
"""
import numpy as np
from math import factorial, exp, log, sqrt, tanh
from scipy.linalg import expm, eigh

D = 160  # brute-force cutoff


def ladder(d):
    return np.diag(np.sqrt(np.arange(1, d)), 1).astype(complex)


def coherent(alpha, d=D):
    v = np.zeros(d, dtype=complex)
    v[0] = np.exp(-abs(alpha)**2 / 2)
    for n in range(1, d):
        v[n] = v[n - 1] * alpha / sqrt(n)
    return v


def qfi(rho, A, tol=1e-12):
    w, U = eigh(rho)
    w = np.where(w < tol, 0.0, w)
    Ab = U.conj().T @ A @ U
    s = 0.0
    for i in range(len(w)):
        for j in range(len(w)):
            if w[i] + w[j] > tol:
                s += (w[i] - w[j])**2 / (w[i] + w[j]) * abs(Ab[i, j])**2
    return 2 * s


def quads(d):
    a = ladder(d)
    return (a + a.conj().T) / sqrt(2), (a - a.conj().T) / (sqrt(2) * 1j)


def report(name, value):
    print(f"{name:55s} {value:.17g}")


a = 1.0
Ne = 2 + 2 * exp(-2 * a * a)
No = 2 - 2 * exp(-2 * a * a)
G = 0.5
NG = 2 + 2 * G * exp(-2 * a * a)
report("decohered_cat a=1 G=0.5 lambda_even", Ne * (1 + G) / (2 * NG))
report("decohered_cat a=1 G=0.5 lambda_odd", No * (1 - G) / (2 * NG))
report("decohered_cat a=1 G=0.5 M closed form", 16 * a * a * G * (G + exp(-2 * a * a)) / NG**2)

# brute-force decohered cat M at D=60
d = 60
ap, am = coherent(1.0, d), coherent(-1.0, d)
rho = (np.outer(ap, ap.conj()) + np.outer(am, am.conj()) + G * (np.outer(ap, am.conj()) + np.outer(am, ap.conj()))) / NG
x, p = quads(d)
F = np.array([[0.0, 0.0], [0.0, 0.0]])
w, U = eigh(rho)
w = np.where(w < 1e-12, 0, w)
R = [U.conj().T @ x @ U, U.conj().T @ p @ U]
for k in range(2):
    for l in range(2):
        s = 0
        for i in range(d):
            for j in range(d):
                if w[i] + w[j] > 1e-12:
                    s += (w[i] - w[j])**2 / (w[i] + w[j]) * (R[k][i, j] * R[l][j, i]).real
        F[k, l] = 2 * s
report("decohered_cat brute-force M", max(np.linalg.eigvalsh(F).max() / 2 - 1, 0))

report("even cat a=1 nbar = tanh(1)", tanh(1.0))
report("even cat a=1 mean quad variance 1+2nbar", 1 + 2 * tanh(1.0))
nb = tanh(1.0)
report("even cat a=1 number QFI 4(a^4+nbar-nbar^2)", 4 * (1 + nb - nb * nb))
report("even cat a=1 sql witness a^4(1-tanh^2)", 1 - tanh(1.0)**2)
report("even cat a=1 M = 2(nbar+a^2)", 2 * (nb + 1))

# squeezed thermal, x-squeezed convention S = exp[(xi* a^2 - xi a^+2)/2]
d = 200
A = ladder(d)
r, nth = 0.8, 0.5
S = expm((r * A @ A - r * A.conj().T @ A.conj().T) / 2)
tau = np.diag([nth**n / (1 + nth)**(n + 1) for n in range(d)]).astype(complex)
rho = S @ tau @ S.conj().T
rho = rho[:120, :120]
xs, ps = quads(120)
mx = np.trace(rho @ xs).real
report("squeezed_thermal r=0.8 nth=0.5 Var(x) brute", np.trace(rho @ xs @ xs).real - mx**2)
report("squeezed_thermal r=0.8 nth=0.5 Var(x) closed", exp(-1.6) * (2 * nth + 1) / 2)
report("squeezed_thermal r=0.8 nth=0.5 M closed", exp(1.6) / (2 * nth + 1) - 1)
report("squeezed vacuum r=0.1 M", exp(0.2) - 1)
report("r_c(nth=0.5)", 0.5 * log(2.0))
report("thermal nth=1 QFI(x) 2/(2n+1)", 2 / 3)
# brute-force thermal QFI
d = 80
tau = np.diag([1.0**n / 2.0**(n + 1) for n in range(d)]).astype(complex)
xs, _ = quads(d)
report("thermal nth=1 QFI(x) brute", qfi(tau, xs))

# squeezed coherent xi=1 alpha=1, Q vs 2nbar
d = 200
A = ladder(d)
S = expm((1.0 * A @ A - 1.0 * A.conj().T @ A.conj().T) / 2)
psi = S @ coherent(1.0, d)
psi = psi[:150]
psi = psi / np.linalg.norm(psi)
xs, ps = quads(150)
n = np.diag(np.arange(150))
var = lambda O: (psi.conj() @ O @ O @ psi).real - (psi.conj() @ O @ psi).real**2
nbar = (psi.conj() @ n @ psi).real
report("squeezed coherent xi=1 a=1 nbar", nbar)
report("squeezed coherent xi=1 a=1 Q", var(xs) + var(ps) - 1)
report("squeezed coherent xi=1 a=1 2nbar", 2 * nbar)

# sufficient alpha formula for |1>
def alpha_star(M, nbar, Iopt, I0, N):
    K = sqrt(I0 * Iopt) + sqrt(nbar + (N + 1) / 2)
    return (K + sqrt(K * K + M * M * nbar)) / M
report("alpha* |1> with I0=0", alpha_star(2, 1, 3, 0, 1))
report("alpha* |1> with I0=1/4", alpha_star(2, 1, 3, 0.25, 1))
report("alpha* |1> with I0=<n^2>=1", alpha_star(2, 1, 3, 1.0, 1))

# photon-added coherent a=1 nbar, Q
d = 60
A = ladder(d)
psi = A.conj().T @ coherent(1.0, d)
psi /= np.linalg.norm(psi)
xs, ps = quads(d)
n = np.diag(np.arange(d))
nbar = (psi.conj() @ n @ psi).real
report("photon-added coherent a=1 nbar", nbar)
report("photon-added coherent a=1 Q", var(xs) + var(ps) - 1)

# Heisenberg sweep slopes (explicit Fock construction, closed forms)
ns = np.arange(1, 9)
I = 16 * ns * (2 * ns + 1)
report("Fock family slope (kappa=4)", np.polyfit(np.log(5 * ns), np.log(I), 1)[0])
