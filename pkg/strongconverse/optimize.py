# /strongconverse/optimize.py
# Ascenso multi-inicio sobre estados puros y objetivos con gradiente analítico.
# Un objetivo recibe el proyector P = |ψ⟩⟨ψ| y devuelve (f, G) con df = Tr[G dP].

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.optimize import minimize

from . import THREADS, linalg

logger = logging.getLogger(__name__)

LN2 = np.log(2.0)
REGULARIZATION = 1e-12
GRID_CHUNK = 40000
CERTIFICATION_GRID = (361, 721)
COARSE_GRID = (37, 73)
GRID_WARN_TOL = 1e-9


def parallel_map(fn, items, threads=None):
    """map determinista: el orden del resultado es el de la entrada."""
    threads = THREADS if threads is None else threads
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def regularize(sigma, eps=REGULARIZATION):
    d = sigma.shape[0]
    return (1.0 - eps) * sigma + eps * np.eye(d) / d


def projectors(psis):
    psis = np.asarray(psis, dtype=complex)
    return np.einsum("ni,nj->nij", psis, psis.conj())


def state_from_params(x, d):
    z = x[:d] + 1j * x[d:]
    return z / np.linalg.norm(z)


def params_from_state(psi):
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.concatenate([psi.real, psi.imag])


def bloch_grid(n_theta, n_phi):
    """Estados puros de un qubit sobre una rejilla (θ, φ) de la esfera de Bloch."""
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.linspace(0.0, 2.0 * np.pi, n_phi)
    t, f = np.meshgrid(theta, phi, indexing="ij")
    t, f = t.reshape(-1), f.reshape(-1)
    return np.stack([np.cos(t / 2), np.exp(1j * f) * np.sin(t / 2)], axis=1)


def batch_log2_trace_power(eigenvalues, alpha):
    """log₂ Σ λ^α fila a fila, estable para α grande."""
    lam = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, None)
    top = lam.max(axis=-1)
    safe = np.where(top > 0, top, 1.0)
    with np.errstate(divide="ignore"):
        out = alpha * np.log2(safe) + np.log2(np.sum((lam / safe[..., None]) ** alpha, axis=-1))
    return np.where(top > 0, out, -np.inf)


def _powered(spec_w, spec_v, alpha):
    """(λ^{α−1} / Σλ^α) reconstruido en la base propia, sin desbordes."""
    lam = np.clip(spec_w, 0.0, None)
    top = lam.max()
    scaled = lam / top
    weights = scaled ** (alpha - 1.0) / (top * np.sum(scaled ** alpha))
    return (spec_v * weights) @ spec_v.conj().T


class PureStateObjective:
    """Objetivo base: subclases definen value_and_gradient y batch_values."""

    def __init__(self, kmap):
        self.kmap = kmap

    @property
    def dim(self):
        return self.kmap.d_in

    def value_and_gradient(self, p):
        raise NotImplementedError

    def batch_values(self, ps):
        raise NotImplementedError


class RelativeEntropyObjective(PureStateObjective):
    """f(P) = D(N(P)‖σ) en bits."""

    def __init__(self, kmap, sigma):
        super().__init__(kmap)
        self.log_sigma = linalg.log2_on_support(regularize(np.asarray(sigma, dtype=complex)))

    def value_and_gradient(self, p):
        omega = self.kmap.apply_to(p)
        w, v = np.linalg.eigh((omega + omega.conj().T) / 2)
        w = np.clip(w, 0.0, None)
        mask = w > 1e-300
        log_w = np.zeros_like(w)
        log_w[mask] = np.log2(w[mask])
        log_omega = (v * log_w) @ v.conj().T
        value = float(np.sum(w * log_w) - np.real(np.sum(omega.T * self.log_sigma)))
        d_out = omega.shape[0]
        grad = self.kmap.adjoint_apply(log_omega - self.log_sigma + np.eye(d_out) / LN2)
        return value, grad

    def batch_values(self, ps):
        out = self.kmap.apply_to(ps)
        w = np.clip(np.linalg.eigvalsh(out), 0.0, None)
        with np.errstate(divide="ignore", invalid="ignore"):
            ent = np.sum(np.where(w > 0, w * np.log2(np.where(w > 0, w, 1.0)), 0.0), axis=-1)
        cross = np.real(np.einsum("nij,ji->n", out, self.log_sigma))
        return ent - cross


class SandwichedObjective(PureStateObjective):
    """f(P) = D̃_α(N(P)‖σ) en bits, para α > 1."""

    def __init__(self, kmap, sigma, alpha):
        super().__init__(kmap)
        self.alpha = float(alpha)
        gamma = (1.0 - self.alpha) / (2.0 * self.alpha)
        self.s = linalg.fractional_power(regularize(np.asarray(sigma, dtype=complex)), gamma)

    def value_and_gradient(self, p):
        a = self.alpha
        x = self.s @ self.kmap.apply_to(p) @ self.s
        w, v = np.linalg.eigh((x + x.conj().T) / 2)
        value = float(linalg.log2_trace_power(w, a) / (a - 1.0))
        inner = self.s @ _powered(w, v, a) @ self.s
        grad = self.kmap.adjoint_apply(inner) * (a / ((a - 1.0) * LN2))
        return value, grad

    def batch_values(self, ps):
        x = self.s @ self.kmap.apply_to(ps) @ self.s
        return batch_log2_trace_power(np.linalg.eigvalsh(x), self.alpha) / (self.alpha - 1.0)


class OutputNormObjective(PureStateObjective):
    """f(P) = log₂ ‖M(P)‖_α para un mapa CP M; con α = 1 es log₂ Tr M(P)."""

    def __init__(self, kmap, alpha):
        super().__init__(kmap)
        self.alpha = float(alpha)

    def value_and_gradient(self, p):
        a = self.alpha
        y = self.kmap.apply_to(p)
        w, v = np.linalg.eigh((y + y.conj().T) / 2)
        if a == 1.0:
            trace = max(float(np.sum(np.clip(w, 0.0, None))), 1e-300)
            return float(np.log2(trace)), self.kmap.adjoint_apply(np.eye(y.shape[0])) / (LN2 * trace)
        value = float(linalg.log2_trace_power(w, a) / a)
        grad = self.kmap.adjoint_apply(_powered(w, v, a)) / LN2
        return value, grad

    def batch_values(self, ps):
        w = np.linalg.eigvalsh(self.kmap.apply_to(ps))
        if self.alpha == 1.0:
            return np.log2(np.clip(np.sum(w, axis=-1), 1e-300, None))
        return batch_log2_trace_power(w, self.alpha) / self.alpha


def _negated(objective):
    d = objective.dim

    def fun(x):
        z = x[:d] + 1j * x[d:]
        n = float(np.real(np.vdot(z, z)))
        p = np.outer(z, z.conj()) / n
        value, g = objective.value_and_gradient(p)
        g = (g + g.conj().T) / 2
        gz = g @ z
        w = gz - (np.real(np.vdot(z, gz)) / n) * z
        grad = np.concatenate([w.real, w.imag]) * (2.0 / n)
        return -value, -grad

    return fun


def ascend(objective, psi0, maxiter=400):
    """Ascenso local L-BFGS desde psi0; devuelve (valor, ψ)."""
    res = minimize(
        _negated(objective), params_from_state(psi0), jac=True, method="L-BFGS-B",
        options={"maxiter": maxiter, "ftol": 1e-15, "gtol": 1e-11},
    )
    psi = state_from_params(res.x, objective.dim)
    value, _ = objective.value_and_gradient(np.outer(psi, psi.conj()))
    return float(value), psi


def grid_values(objective, shape=COARSE_GRID):
    psis = bloch_grid(*shape)
    values = np.concatenate([
        objective.batch_values(projectors(psis[i:i + GRID_CHUNK]))
        for i in range(0, len(psis), GRID_CHUNK)
    ])
    return values, psis


def maximize_over_pure_states(objective, n_starts, seed=None, warm_starts=(), grid=None, n_grid_starts=3):
    """sup_ψ f(|ψ⟩⟨ψ|) por ascenso multi-inicio.

    Con entrada de qubit y `grid` dado, la rejilla de Bloch aporta además un
    valor de referencia y sus mejores puntos se usan como inicios; si la
    rejilla supera al ascenso se devuelve el punto de la rejilla.
    Devuelve (valor, ψ, valor_de_rejilla).
    """
    d = objective.dim
    starts = [np.asarray(s, dtype=complex).reshape(-1) for s in warm_starts]
    grid_best, grid_psi = None, None
    if grid is not None and d == 2:
        values, psis = grid_values(objective, grid)
        grid_best = float(np.max(values))
        grid_psi = psis[int(np.argmax(values))]
        order = np.argsort(values, kind="stable")[::-1][:n_grid_starts]
        starts.extend(psis[i] for i in order)
    rngs = [np.random.default_rng(s) for s in linalg.spawn_seeds(seed, n_starts)]
    starts.extend(linalg.ginibre(d, 1, rng).reshape(-1) for rng in rngs)

    results = parallel_map(lambda s: ascend(objective, s), starts)
    best_value, best_psi = -np.inf, None
    for value, psi in results:
        if value > best_value:
            best_value, best_psi = value, psi
    if grid_best is not None and grid_best > best_value:
        if grid_best - best_value > GRID_WARN_TOL:
            logger.warning("[optimizador] la rejilla supera al ascenso: %.3e", grid_best - best_value)
        best_value, best_psi = grid_best, grid_psi
    return best_value, best_psi, grid_best
