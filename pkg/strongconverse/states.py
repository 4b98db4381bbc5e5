# /strongconverse/states.py
# Estados, POVMs, ensambles y la prueba de transpuesta parcial positiva (PPT).

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InvalidParameter, InvalidProbability, StateInvalid

STATE_PSD_TOL = 1e-9
STATE_TRACE_TOL = 1e-9
POVM_SUM_TOL = 1e-8
ENSEMBLE_SUM_TOL = 1e-10
CONCLUSIVE_PPT_DIMS = {(2, 2), (2, 3), (3, 2)}


def matrix_of(x):
    """Devuelve el ndarray de un DensityOperator o de cualquier matriz."""
    return x.matrix if isinstance(x, DensityOperator) else np.asarray(x, dtype=complex)


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Operador densidad validado: hermítico, semidefinido positivo y de traza 1."""
    matrix: np.ndarray
    dims: tuple = field(default=None)

    def __post_init__(self):
        a = linalg.check_hermitian(self.matrix)
        dims = tuple(int(d) for d in self.dims) if self.dims is not None else (a.shape[0],)
        if int(np.prod(dims)) != a.shape[0]:
            raise DimensionMismatch(f"dims={dims} no corresponde a dimensión {a.shape[0]}")
        trace = np.trace(a).real
        if abs(trace - 1.0) > STATE_TRACE_TOL:
            raise StateInvalid(f"Traza {trace:.12f} distinta de 1")
        min_eig = np.linalg.eigvalsh(a)[0]
        if min_eig < -STATE_PSD_TOL:
            raise StateInvalid(f"Autovalor mínimo {min_eig:.3e} negativo")
        object.__setattr__(self, "matrix", _frozen(a))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @classmethod
    def from_vector(cls, psi, dims=None):
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), dims)

    @classmethod
    def maximally_mixed(cls, d):
        return cls(np.eye(d, dtype=complex) / d)


@dataclass(frozen=True, eq=False)
class Povm:
    """Medición generalizada: elementos PSD que suman la identidad."""
    elements: tuple

    def __post_init__(self):
        elems = [linalg.check_hermitian(e) for e in self.elements]
        if not elems:
            raise InvalidParameter("El POVM necesita al menos un elemento")
        d = elems[0].shape[0]
        if any(e.shape != (d, d) for e in elems):
            raise DimensionMismatch("Los elementos del POVM tienen dimensiones distintas")
        for k, e in enumerate(elems):
            if np.linalg.eigvalsh(e)[0] < -STATE_PSD_TOL:
                raise InvalidParameter(f"El elemento {k} del POVM no es semidefinido positivo")
        deviation = np.max(np.abs(sum(elems) - np.eye(d)))
        if deviation > POVM_SUM_TOL:
            raise InvalidParameter(f"Σ Λ_m difiere de la identidad en {deviation:.3e}")
        object.__setattr__(self, "elements", tuple(_frozen(e) for e in elems))

    @property
    def dim(self):
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Ensamble {p_X(x), ρ_x} de estados con dimensión común."""
    probs: tuple
    states: tuple

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).reshape(-1)
        states = [matrix_of(s) for s in self.states]
        if len(probs) != len(states) or not states:
            raise DimensionMismatch("probs y states deben tener la misma longitud no nula")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > ENSEMBLE_SUM_TOL:
            raise InvalidProbability(f"Probabilidades inválidas (suma {probs.sum():.12f})")
        d = states[0].shape[0]
        if any(s.shape != (d, d) for s in states):
            raise DimensionMismatch("Los estados del ensamble deben compartir dimensión")
        probs = probs.copy()
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "states", tuple(_frozen(s) for s in states))

    @property
    def dim(self):
        return self.states[0].shape[0]

    def __len__(self):
        return len(self.probs)


@dataclass(frozen=True)
class BipartiteCut:
    d_a: int
    d_b: int

    def check(self, m):
        if m.shape != (self.d_a * self.d_b, self.d_a * self.d_b):
            raise DimensionMismatch(f"Corte {self.d_a}×{self.d_b} incompatible con {m.shape}")


@dataclass(frozen=True)
class PptReport:
    is_ppt: bool
    min_eigenvalue: float
    conclusive: bool

    def __bool__(self):
        return self.is_ppt


def group_registers(m, dims, left):
    """Agrupa los registros `left` a la izquierda del corte y el resto a la derecha."""
    left = [int(i) for i in left]
    right = [i for i in range(len(dims)) if i not in left]
    permuted = linalg.permute_systems(matrix_of(m), dims, left + right)
    d_a = int(np.prod([dims[i] for i in left])) if left else 1
    d_b = int(np.prod([dims[i] for i in right])) if right else 1
    return permuted, BipartiteCut(d_a, d_b)


def measurement_probabilities(rho, povm):
    """p_m = Tr(ρ Λ_m), recortadas a [0, 1]."""
    r = matrix_of(rho)
    if r.shape[0] != povm.dim:
        raise DimensionMismatch(f"Estado de dimensión {r.shape[0]} y POVM de dimensión {povm.dim}")
    probs = np.array([np.real(np.sum(e.T * r)) for e in povm.elements])
    if np.any(probs < -STATE_PSD_TOL) or np.any(probs > 1 + STATE_PSD_TOL):
        raise StateInvalid(f"Probabilidades fuera de [0,1]: {probs}")
    return np.clip(probs, 0.0, 1.0)


def partial_transpose(rho, cut):
    """Transpone los índices del subsistema B."""
    r = matrix_of(rho)
    cut.check(r)
    d = cut.d_a * cut.d_b
    return r.reshape(cut.d_a, cut.d_b, cut.d_a, cut.d_b).transpose(0, 3, 2, 1).reshape(d, d)


def is_ppt(rho, cut, tol=1e-9):
    pt = partial_transpose(rho, cut)
    min_eig = float(np.linalg.eigvalsh((pt + pt.conj().T) / 2)[0])
    return PptReport(
        is_ppt=min_eig >= -tol,
        min_eigenvalue=min_eig,
        conclusive=(cut.d_a, cut.d_b) in CONCLUSIVE_PPT_DIMS,
    )


def mix_ensemble(e):
    return DensityOperator(np.tensordot(e.probs, np.array(e.states), axes=1))


def cq_state(e):
    """Σ_x p_x |x⟩⟨x| ⊗ ρ_x con dims [|X|, d]."""
    n, d = len(e), e.dim
    out = np.zeros((n * d, n * d), dtype=complex)
    for x, (p, s) in enumerate(zip(e.probs, e.states)):
        out[x * d:(x + 1) * d, x * d:(x + 1) * d] = p * s
    return DensityOperator(out, (n, d))


# --- Estados de uso frecuente ---

def ket(index, d):
    v = np.zeros(d, dtype=complex)
    v[index] = 1.0
    return v


def projector(vec):
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def maximally_mixed(d):
    return np.eye(d, dtype=complex) / d


def bell_state(d=2):
    """|Φ⟩⟨Φ| maximalmente entrelazado en d×d."""
    phi = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return np.outer(phi, phi.conj())


def random_pure_state(d, seed=None):
    v = linalg.ginibre(d, 1, linalg.random_generator(seed)).reshape(-1)
    return v / np.linalg.norm(v)


def random_povm(d, n_outcomes, seed=None):
    """POVM aleatorio Λ_k = S^{-1/2} G_k S^{-1/2} con G_k de Wishart."""
    rng = linalg.random_generator(seed)
    gs = []
    for _ in range(n_outcomes):
        g = linalg.ginibre(d, d, rng)
        gs.append(g @ g.conj().T)
    s_inv_half = linalg.fractional_power(sum(gs), -0.5)
    return Povm(tuple(s_inv_half @ g @ s_inv_half for g in gs))


def random_ensemble(d, size, seed=None, pure=False):
    rng = linalg.random_generator(seed)
    probs = rng.dirichlet(np.ones(size))
    if pure:
        states = [projector(random_pure_state(d, rng)) for _ in range(size)]
    else:
        states = [linalg.random_density(d, seed=rng) for _ in range(size)]
    return Ensemble(tuple(probs), tuple(states))
