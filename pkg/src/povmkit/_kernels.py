"""Hot numeric kernels.

Each kernel exists twice: a loop-based version compiled with ``numba.njit``
and a vectorized pure-numpy version. The public names at the bottom of the
module are bound to one set or the other at import time. Set the environment
variable ``POVMKIT_DISABLE_NUMBA=1`` (or uninstall numba) to force the numpy
path. Both sets are always importable as ``NUMBA_KERNELS`` / ``NUMPY_KERNELS``
for benchmarking and cross-checks.

Factor layout used by the optimizer kernels: a real vector ``x`` of length
``2*n*d*k`` holds the real parts of ``n`` complex ``d x k`` matrices in C order,
followed by their imaginary parts.
"""

from __future__ import annotations

import os
import types

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("POVMKIT_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"

# objective value reported for parameters whose total T is singular
PENALTY = 1e30
SINGULAR_RTOL = 1e-12
# eigenvalues below this fraction of the largest are roundoff and are zeroed
# before square-rooting; otherwise a 1e-17 eigenvalue contributes 3e-9
SQRT_RTOL = 64 * np.finfo(np.float64).eps


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _np_sqrt_psd(E):
    w, V = np.linalg.eigh(E)
    cut = SQRT_RTOL * np.max(np.abs(w), axis=-1, keepdims=True)
    r = np.sqrt(np.where(w > cut, w, 0.0))
    R = (V * r[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))
    return R, w


def _np_gram(R):
    n = R.shape[0]
    flat = R.reshape(n, -1)
    # tr(A B) = sum_ab A_ab conj(B_ab) for Hermitian B
    return (flat @ flat.conj().T).real


def _np_superoperator(R, basis):
    d = R.shape[1]
    K = np.zeros((d * d, d * d), dtype=np.complex128)
    for Rl in R:
        K += np.kron(Rl, Rl.T)
    B = basis.reshape(d * d, d * d).T
    return (B.conj().T @ K @ B).real


def _np_factor_effects(x, d, n, k):
    m = n * d * k
    G = (x[:m] + 1j * x[m:]).reshape(n, d, k)
    T = np.einsum("iab,icb->ac", G, G.conj())
    w, V = np.linalg.eigh(T)
    if not w[0] > SINGULAR_RTOL * w[-1]:
        return np.zeros((n, d, k), dtype=np.complex128), False
    Tm = (V / np.sqrt(w)) @ V.conj().T
    return Tm @ G, True


def _np_sqrt_gram_from_factors(H, k):
    """Gram matrix of effect square roots and tr(sqrt E_i), from E_i = H_i H_i^dag."""
    n = H.shape[0]
    if k == 1:
        h = H[:, :, 0]
        nrm2 = np.einsum("ia,ia->i", h, h.conj()).real
        if np.any(nrm2 <= 1e-300):
            return None, None
        nrm = np.sqrt(nrm2)
        ov = h.conj() @ h.T
        S = (ov * ov.conj()).real / np.outer(nrm, nrm)
        return S, nrm
    E = H @ np.conj(np.swapaxes(H, -1, -2))
    R, _ = _np_sqrt_psd(E)
    S = _np_gram(R)
    tr = np.trace(R, axis1=1, axis2=2).real
    return S, tr


def _np_orthogonality_objective(x, d, n, k):
    H, ok = _np_factor_effects(x, d, n, k)
    if not ok:
        return PENALTY
    S, _ = _np_sqrt_gram_from_factors(H, k)
    if S is None:
        return PENALTY
    S = S - np.eye(n)
    return float(np.sum(S * S))


def _np_disturbance_objective(x, d, n, k):
    H, ok = _np_factor_effects(x, d, n, k)
    if not ok:
        return PENALTY
    S, tr = _np_sqrt_gram_from_factors(H, k)
    if S is None:
        return PENALTY
    return float(np.sum(S * S) - 2.0 * np.sum(tr * tr) + d * d)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------


def _nb_sqrt_psd(E):
    n, d, _ = E.shape
    R = np.empty_like(E)
    W = np.empty((n, d))
    for i in range(n):
        w, V = np.linalg.eigh(E[i])
        cut = 0.0
        for a in range(d):
            W[i, a] = w[a]
            cut = max(cut, abs(w[a]))
        cut *= SQRT_RTOL
        for a in range(d):
            for b in range(d):
                acc = 0j
                for c in range(d):
                    if w[c] > cut:
                        acc += V[a, c] * np.sqrt(w[c]) * np.conj(V[b, c])
                R[i, a, b] = acc
    return R, W


def _nb_gram(R):
    n, d, _ = R.shape
    S = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            acc = 0.0
            for a in range(d):
                for b in range(d):
                    z = R[i, a, b]
                    y = R[j, a, b]
                    acc += z.real * y.real + z.imag * y.imag
            S[i, j] = acc
            S[j, i] = acc
    return S


def _nb_superoperator(R, basis):
    n, d, _ = R.shape
    m = d * d
    # apply the channel to every basis element, then project
    out = np.zeros((m, m))
    for j in range(m):
        Y = np.zeros((d, d), dtype=np.complex128)
        X = basis[j]
        for l in range(n):
            Y += R[l] @ X @ R[l]
        for i in range(m):
            acc = 0.0
            Xi = basis[i]
            for a in range(d):
                for b in range(d):
                    z = Xi[a, b] * Y[b, a]
                    acc += z.real
            out[i, j] = acc
    return out


def _nb_factor_effects(x, d, n, k):
    m = n * d * k
    H = np.empty((n, d, k), dtype=np.complex128)
    for idx in range(m):
        i = idx // (d * k)
        rem = idx % (d * k)
        H[i, rem // k, rem % k] = complex(x[idx], x[m + idx])
    T = np.zeros((d, d), dtype=np.complex128)
    for i in range(n):
        for a in range(d):
            for c in range(d):
                acc = 0j
                for b in range(k):
                    acc += H[i, a, b] * np.conj(H[i, c, b])
                T[a, c] += acc
    w, V = np.linalg.eigh(T)
    if not w[0] > SINGULAR_RTOL * w[-1]:
        return H, False
    Tm = np.zeros((d, d), dtype=np.complex128)
    for a in range(d):
        for c in range(d):
            acc = 0j
            for e in range(d):
                acc += V[a, e] * np.conj(V[c, e]) / np.sqrt(w[e])
            Tm[a, c] = acc
    out = np.empty_like(H)
    for i in range(n):
        out[i] = Tm @ H[i]
    return out, True


def _nb_sqrt_gram_from_factors(H, k):
    n, d, _ = H.shape
    S = np.empty((n, n))
    tr = np.empty(n)
    if k == 1:
        for i in range(n):
            acc = 0.0
            for a in range(d):
                z = H[i, a, 0]
                acc += z.real * z.real + z.imag * z.imag
            if acc <= 1e-300:
                return S, tr, False
            tr[i] = np.sqrt(acc)
        for i in range(n):
            S[i, i] = tr[i] * tr[i]
            for j in range(i + 1, n):
                ov = 0j
                for a in range(d):
                    ov += np.conj(H[i, a, 0]) * H[j, a, 0]
                v = (ov.real * ov.real + ov.imag * ov.imag) / (tr[i] * tr[j])
                S[i, j] = v
                S[j, i] = v
        return S, tr, True
    E = np.empty((n, d, d), dtype=np.complex128)
    for i in range(n):
        E[i] = H[i] @ np.conj(H[i]).T
    R, _ = _nb_sqrt_psd_inner(E)
    S = _nb_gram_inner(R)
    for i in range(n):
        acc = 0.0
        for a in range(d):
            acc += R[i, a, a].real
        tr[i] = acc
    return S, tr, True


def _nb_orthogonality_objective(x, d, n, k):
    H, ok = _nb_factor_effects_inner(x, d, n, k)
    if not ok:
        return PENALTY
    S, tr, ok = _nb_sqrt_gram_inner(H, k)
    if not ok:
        return PENALTY
    acc = 0.0
    for i in range(n):
        for j in range(n):
            v = S[i, j] - 1.0 if i == j else S[i, j]
            acc += v * v
    return acc


def _nb_disturbance_objective(x, d, n, k):
    H, ok = _nb_factor_effects_inner(x, d, n, k)
    if not ok:
        return PENALTY
    S, tr, ok = _nb_sqrt_gram_inner(H, k)
    if not ok:
        return PENALTY
    acc = 0.0
    for i in range(n):
        acc -= 2.0 * tr[i] * tr[i]
        for j in range(n):
            acc += S[i, j] * S[i, j]
    return acc + d * d


# objective dispatch by integer code
# ---------------------------------------------------------------------------

OBJECTIVE_CODES = {"orthogonality": 0, "disturbance": 1}


def _objective(code, x, d, n, k):
    if code == 0:
        return _np_orthogonality_objective(x, d, n, k)
    return _np_disturbance_objective(x, d, n, k)


# ---------------------------------------------------------------------------
# Nelder-Mead (shared source; jitted when numba is active)
# ---------------------------------------------------------------------------


def _nelder_mead(code, x0, d, n, k, max_iter, fatol, xatol):
    """Adaptive Nelder-Mead on objective ``code`` with simplex re-seeding on collapse.

    Returns ``(x_best, f_best, iterations, converged, trace, nfev)`` where
    ``trace[i]`` is the best objective value after iteration ``i``.
    """
    N = x0.shape[0]
    rho = 1.0
    chi = 1.0 + 2.0 / N
    psi = 0.75 - 1.0 / (2.0 * N)
    sigma = 1.0 - 1.0 / N

    sim = np.empty((N + 1, N))
    fs = np.empty(N + 1)
    trace = np.empty(max_iter)
    nfev = 0

    sim[0] = x0
    fs[0] = _objective(code, x0, d, n, k)
    nfev += 1
    for i in range(N):
        y = x0.copy()
        y[i] = y[i] * 1.05 if y[i] != 0.0 else 0.00025
        sim[i + 1] = y
        fs[i + 1] = _objective(code, y, d, n, k)
        nfev += 1

    last_reseed_value = np.inf
    converged = False
    it = 0
    while it < max_iter:
        order = np.argsort(fs)
        sim = sim[order]
        fs = fs[order]

        spread_x = np.max(np.abs(sim[1:] - sim[0]))
        spread_f = np.max(np.abs(fs[1:] - fs[0]))
        if spread_x <= xatol and spread_f <= fatol:
            if last_reseed_value - fs[0] <= fatol:
                converged = True
                break
            # collapsed simplex: rebuild around the incumbent and keep going
            last_reseed_value = fs[0]
            x = sim[0].copy()
            for i in range(N):
                y = x.copy()
                y[i] = y[i] * 1.05 if y[i] != 0.0 else 0.00025
                sim[i + 1] = y
                fs[i + 1] = _objective(code, y, d, n, k)
                nfev += 1
            continue

        xbar = np.sum(sim[:N], axis=0) / N

        xr = (1.0 + rho) * xbar - rho * sim[N]
        fxr = _objective(code, xr, d, n, k)
        nfev += 1
        doshrink = False
        if fxr < fs[0]:
            xe = (1.0 + rho * chi) * xbar - rho * chi * sim[N]
            fxe = _objective(code, xe, d, n, k)
            nfev += 1
            if fxe < fxr:
                sim[N] = xe
                fs[N] = fxe
            else:
                sim[N] = xr
                fs[N] = fxr
        elif fxr < fs[N - 1]:
            sim[N] = xr
            fs[N] = fxr
        elif fxr < fs[N]:
            xc = (1.0 + psi * rho) * xbar - psi * rho * sim[N]
            fxc = _objective(code, xc, d, n, k)
            nfev += 1
            if fxc <= fxr:
                sim[N] = xc
                fs[N] = fxc
            else:
                doshrink = True
        else:
            xcc = (1.0 - psi) * xbar + psi * sim[N]
            fxcc = _objective(code, xcc, d, n, k)
            nfev += 1
            if fxcc < fs[N]:
                sim[N] = xcc
                fs[N] = fxcc
            else:
                doshrink = True
        if doshrink:
            for i in range(1, N + 1):
                sim[i] = sim[0] + sigma * (sim[i] - sim[0])
                fs[i] = _objective(code, sim[i], d, n, k)
                nfev += 1

        trace[it] = np.min(fs)
        it += 1

    ib = np.argmin(fs)
    return sim[ib].copy(), fs[ib], it, converged, trace[:it].copy(), nfev


# ---------------------------------------------------------------------------
# binding
# ---------------------------------------------------------------------------

NUMPY_KERNELS = {
    "sqrt_psd": _np_sqrt_psd,
    "gram": _np_gram,
    "superoperator": _np_superoperator,
    "factor_effects": _np_factor_effects,
    "orthogonality_objective": _np_orthogonality_objective,
    "disturbance_objective": _np_disturbance_objective,
    "nelder_mead": _nelder_mead,
}

if HAVE_NUMBA:
    _jit = numba.njit(cache=True)
    _nb_sqrt_psd_inner = _jit(_nb_sqrt_psd)
    _nb_gram_inner = _jit(_nb_gram)
    _nb_factor_effects_inner = _jit(_nb_factor_effects)
    _nb_sqrt_gram_inner = _jit(_nb_sqrt_gram_from_factors)
    _nb_orthogonality_jit = _jit(_nb_orthogonality_objective)
    _nb_disturbance_jit = _jit(_nb_disturbance_objective)

    @_jit
    def _nb_objective(code, x, d, n, k):
        if code == 0:
            return _nb_orthogonality_jit(x, d, n, k)
        return _nb_disturbance_jit(x, d, n, k)

    # Same simplex source, but with ``_objective`` resolved to the compiled
    # dispatch. A distinct qualname keeps its on-disk cache separate.
    _nb_nm_globals = dict(globals())
    _nb_nm_globals["_objective"] = _nb_objective
    _nb_nelder_mead = types.FunctionType(_nelder_mead.__code__, _nb_nm_globals, "_nb_nelder_mead")
    _nb_nelder_mead.__qualname__ = "_nb_nelder_mead"

    NUMBA_KERNELS = {
        "sqrt_psd": _nb_sqrt_psd_inner,
        "gram": _nb_gram_inner,
        "superoperator": _jit(_nb_superoperator),
        "factor_effects": _nb_factor_effects_inner,
        "orthogonality_objective": _nb_orthogonality_jit,
        "disturbance_objective": _nb_disturbance_jit,
        "nelder_mead": _jit(_nb_nelder_mead),
    }
else:  # pragma: no cover
    NUMBA_KERNELS = None

KERNELS = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS

sqrt_psd = KERNELS["sqrt_psd"]
gram = KERNELS["gram"]
superoperator = KERNELS["superoperator"]
factor_effects = KERNELS["factor_effects"]
orthogonality_objective = KERNELS["orthogonality_objective"]
disturbance_objective = KERNELS["disturbance_objective"]
nelder_mead = KERNELS["nelder_mead"]

OBJECTIVES = {
    "orthogonality": orthogonality_objective,
    "disturbance": disturbance_objective,
}
