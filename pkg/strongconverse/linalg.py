# /strongconverse/linalg.py
# Núcleo de álgebra lineal densa: descomposición espectral hermítica,
# potencias sobre el soporte, normas de Schatten y estructura tensorial.

import logging
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import EIGH_METHOD
from .errors import DimensionMismatch, InvalidOrder, NegativeEigenvalue, NonHermitian, NonSquare

logger = logging.getLogger(__name__)

HERMITICITY_TOL = 1e-10
SUPPORT_CUTOFF = 1e-10
NEGATIVITY_TOL = 1e-8
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class Spectrum:
    """Autovalores en orden descendente y autovectores ortonormales por columnas."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    @property
    def lambda_max(self):
        return float(np.max(np.abs(self.eigenvalues))) if self.eigenvalues.size else 0.0


def as_matrix(m):
    """Convierte a ndarray complejo 2D y exige entradas finitas."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise NonSquare(f"Se esperaba una matriz 2D, se recibió ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("La matriz contiene entradas no finitas")
    return a


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def check_hermitian(m, tol=HERMITICITY_TOL):
    """Valida que m sea cuadrada y hermítica; devuelve la parte hermítica exacta."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"Matriz no cuadrada: {a.shape}")
    scale = max(1.0, np.linalg.norm(a, ord=np.inf))
    deviation = np.linalg.norm(a - a.conj().T, ord=np.inf)
    if deviation > tol * scale:
        raise NonHermitian(f"‖M − M†‖ = {deviation:.3e} supera la tolerancia {tol:.1e}")
    return (a + a.conj().T) / 2


def jacobi_eigh(m, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Jacobi cíclico para matrices hermíticas complejas.

    Cada rotación primero fija la fase del pivote para volverlo real y después
    aplica la rotación real clásica sobre el par (p, q).
    """
    a = np.array(m, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a)
    if n == 1 or norm == 0.0:
        return np.real(np.diag(a)).copy(), v

    for sweep in range(max_sweeps):
        off = np.sqrt(max(np.linalg.norm(a) ** 2 - np.sum(np.abs(np.diag(a)) ** 2), 0.0))
        if off < tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                sign = 1.0 if theta >= 0 else -1.0
                t = sign / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    else:
        logger.warning("[jacobi] sin convergencia tras %d barridos", max_sweeps)
    return np.real(np.diag(a)).copy(), v


def eigh(m, tol=HERMITICITY_TOL, method=None):
    """Descomposición espectral de un operador hermítico, autovalores descendentes."""
    a = check_hermitian(m, tol)
    method = (method or EIGH_METHOD).lower()
    if method == "jacobi":
        w, v = jacobi_eigh(a)
    else:
        w, v = np.linalg.eigh(a)
    order = np.argsort(w, kind="stable")[::-1]
    return Spectrum(eigenvalues=np.asarray(w)[order], eigenvectors=np.asarray(v)[:, order])


def support_mask(eigenvalues, cutoff=SUPPORT_CUTOFF):
    lam_max = np.max(np.abs(eigenvalues)) if eigenvalues.size else 0.0
    return eigenvalues > cutoff * lam_max if lam_max > 0 else np.zeros(eigenvalues.shape, dtype=bool)


def psd_spectrum(m, tol=NEGATIVITY_TOL):
    """eigh con la comprobación de semidefinición positiva relativa a λ_max."""
    spec = eigh(m)
    lam = spec.eigenvalues
    if lam.size and lam[-1] < -tol * max(spec.lambda_max, 1e-300):
        raise NegativeEigenvalue(f"Autovalor mínimo {lam[-1]:.3e} por debajo de −{tol:.0e}·λ_max")
    return spec


def matrix_function(m, f, spectrum=None):
    """Aplica f a los autovalores del soporte; el núcleo se envía a 0."""
    spec = spectrum or psd_spectrum(m)
    lam, v = spec.eigenvalues, spec.eigenvectors
    mask = support_mask(lam)
    values = np.zeros(lam.shape, dtype=float)
    values[mask] = f(lam[mask])
    return (v * values) @ v.conj().T


def fractional_power(m, p, spectrum=None):
    """M^p calculada sobre el soporte, válida también para p negativo."""
    return matrix_function(m, lambda x: np.power(x, p), spectrum)


def log2_on_support(m, spectrum=None):
    return matrix_function(m, np.log2, spectrum)


def support_projector(m, spectrum=None):
    return matrix_function(m, np.ones_like, spectrum)


def schatten_norm(m, alpha):
    """(Σ s_i^α)^{1/α}; α = inf devuelve la norma de operador."""
    if alpha < 1:
        raise InvalidOrder(f"La norma de Schatten requiere α ≥ 1, se recibió {alpha}")
    a = as_matrix(m)
    if a.shape[0] == a.shape[1] and np.allclose(a, a.conj().T, atol=1e-12):
        s = np.abs(np.linalg.eigvalsh((a + a.conj().T) / 2))
    else:
        s = np.linalg.svd(a, compute_uv=False)
    s_max = float(np.max(s)) if s.size else 0.0
    if s_max == 0.0:
        return 0.0
    if np.isinf(alpha):
        return s_max
    return s_max * float(np.sum((s / s_max) ** alpha)) ** (1.0 / alpha)


def log2_trace_power(eigenvalues, alpha):
    """log₂ Σ λ^α sobre λ > 0, estable para α grande."""
    lam = np.asarray(eigenvalues, dtype=float)
    lam = lam[lam > 0]
    if lam.size == 0:
        return -np.inf
    top = lam.max()
    return alpha * np.log2(top) + np.log2(np.sum((lam / top) ** alpha))


def kron(*matrices):
    """Producto de Kronecker de varios factores, índice (i_A, i_B) ↦ i_A·d_B + i_B."""
    if not matrices:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, [np.asarray(x, dtype=complex) for x in matrices])


def _check_dims(m, dims):
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise DimensionMismatch(f"dims={list(dims)} no corresponde a una matriz {m.shape}")


def partial_trace(m, dims, keep):
    """Traza parcial sobre los subsistemas que no están en keep (orden original)."""
    a = as_matrix(m)
    dims = [int(d) for d in dims]
    _check_dims(a, dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionMismatch(f"Índices {keep} fuera de rango para {len(dims)} subsistemas")
    tensor = a.reshape(dims + dims)
    current = list(dims)
    for i in sorted(set(range(len(dims))) - set(keep), reverse=True):
        tensor = np.trace(tensor, axis1=i, axis2=i + len(current))
        current.pop(i)
    d = int(np.prod(current)) if current else 1
    return tensor.reshape(d, d)


def permute_systems(m, dims, order):
    """Reordena los factores tensoriales: el subsistema order[k] pasa a la posición k."""
    a = as_matrix(m)
    dims = [int(d) for d in dims]
    _check_dims(a, dims)
    if sorted(order) != list(range(len(dims))):
        raise DimensionMismatch(f"Permutación inválida {order}")
    n = len(dims)
    axes = list(order) + [n + o for o in order]
    total = a.shape[0]
    return a.reshape(dims + dims).transpose(axes).reshape(total, total)


def random_generator(seed):
    """Generador numpy a partir de una semilla, SeedSequence o Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_seeds(seed, n):
    """Semillas hijas deterministas para reinicios independientes."""
    if isinstance(seed, np.random.SeedSequence):
        return seed.spawn(n)
    return np.random.SeedSequence(seed).spawn(n)


def ginibre(rows, cols, rng):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_random_unitary(d, seed=None):
    """Unitaria Haar vía QR con corrección de fases."""
    rng = random_generator(seed)
    q, r = np.linalg.qr(ginibre(d, d, rng))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def haar_random_isometry(d_out, d_in, seed=None):
    return haar_random_unitary(d_out, seed)[:, :d_in]


def random_density(d, rank=None, seed=None):
    """Matriz densidad aleatoria de rango dado (medida inducida de Ginibre)."""
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise DimensionMismatch(f"El rango debe estar en [1, {d}], se recibió {rank}")
    g = ginibre(d, rank, random_generator(seed))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(d, seed=None):
    g = ginibre(d, d, random_generator(seed))
    return (g + g.conj().T) / 2
