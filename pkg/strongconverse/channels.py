# /strongconverse/channels.py
# Canales cuánticos en forma de Kraus y de Choi, canales de medir y preparar,
# detección de canales que rompen entrelazamiento y el zoológico de canales.

import enum
import logging
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InvalidParameter, NotCPTP
from .states import BipartiteCut, DensityOperator, Povm, is_ppt, matrix_of, random_povm

logger = logging.getLogger(__name__)

TP_TOL = 1e-8
KRAUS_CUTOFF = 1e-10
CHOI_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class KrausMap:
    """Mapa completamente positivo Σ_k K_k X K_k†, no necesariamente preservador de traza."""
    kraus_ops: tuple

    def __post_init__(self):
        ops = [np.array(k, dtype=complex) for k in self.kraus_ops]
        if not ops:
            raise InvalidParameter("Se necesita al menos un operador de Kraus")
        shape = ops[0].shape
        if len(shape) != 2 or any(k.shape != shape for k in ops):
            raise DimensionMismatch("Los operadores de Kraus deben compartir forma d_out×d_in")
        stacked = np.stack(ops)
        stacked.setflags(write=False)
        object.__setattr__(self, "kraus_ops", tuple(stacked))
        object.__setattr__(self, "_stacked", stacked)

    @property
    def stacked(self):
        return self._stacked

    @property
    def d_in(self):
        return self._stacked.shape[2]

    @property
    def d_out(self):
        return self._stacked.shape[1]

    def apply_to(self, m):
        """Acción sobre una matriz (o un lote de matrices en el primer eje)."""
        m = np.asarray(m, dtype=complex)
        if m.shape[-1] != self.d_in:
            raise DimensionMismatch(f"Entrada de dimensión {m.shape[-1]}, se esperaba {self.d_in}")
        k = self._stacked
        if m.ndim == 3:
            return np.einsum("kij,bjl,kml->bim", k, m, k.conj(), optimize=True)
        return np.einsum("kij,jl,kml->im", k, m, k.conj(), optimize=True)

    def adjoint_apply(self, y):
        """Imagen de Heisenberg N†(Y) = Σ K† Y K."""
        k = self._stacked
        y = np.asarray(y, dtype=complex)
        if y.ndim == 3:
            return np.einsum("kji,bjl,klm->bim", k.conj(), y, k, optimize=True)
        return np.einsum("kji,jl,klm->im", k.conj(), y, k, optimize=True)

    def tp_deviation(self):
        k = self._stacked
        gram = np.einsum("kji,kjl->il", k.conj(), k)
        return float(np.max(np.abs(gram - np.eye(self.d_in))))


class KrausChannel(KrausMap):
    """Canal CPTP: además exige Σ K†K = I dentro de 1e−8."""

    def __post_init__(self):
        super().__post_init__()
        deviation = self.tp_deviation()
        if deviation > TP_TOL:
            raise NotCPTP(f"Σ K†K difiere de la identidad en {deviation:.3e}")

    @property
    def is_eb_by_construction(self):
        return False


@dataclass(frozen=True, eq=False)
class MeasurePrepareChannel:
    """N(ρ) = Σ_m Tr(Λ_m ρ) σ_m."""
    povm: Povm
    prepared_states: tuple

    def __post_init__(self):
        states = tuple(matrix_of(s) for s in self.prepared_states)
        if len(states) != len(self.povm):
            raise DimensionMismatch("El POVM y los estados preparados deben tener igual longitud")
        for s in states:
            DensityOperator(s)
        object.__setattr__(self, "prepared_states", states)
        object.__setattr__(self, "_kraus", measure_prepare_to_kraus(self))

    @property
    def d_in(self):
        return self.povm.dim

    @property
    def d_out(self):
        return self.prepared_states[0].shape[0]

    @property
    def stacked(self):
        return self._kraus.stacked

    @property
    def kraus_ops(self):
        return self._kraus.kraus_ops

    @property
    def is_eb_by_construction(self):
        return True

    def apply_to(self, m):
        return self._kraus.apply_to(m)

    def adjoint_apply(self, y):
        return self._kraus.adjoint_apply(y)

    def as_kraus(self):
        return self._kraus


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Estado de Choi normalizado (id⊗N)(|Φ⟩⟨Φ|), orden de factores entrada⊗salida."""
    matrix: np.ndarray
    d_in: int
    d_out: int

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=complex)
        if a.shape != (self.d_in * self.d_out,) * 2:
            raise DimensionMismatch(f"Choi de forma {a.shape} incompatible con {self.d_in}×{self.d_out}")
        if np.max(np.abs(a - a.conj().T)) > CHOI_TOL:
            raise NotCPTP("La matriz de Choi no es hermítica")
        a = (a + a.conj().T) / 2
        if np.linalg.eigvalsh(a)[0] < -CHOI_TOL:
            raise NotCPTP("La matriz de Choi no es semidefinida positiva")
        marginal = linalg.partial_trace(a, [self.d_in, self.d_out], [0])
        if np.max(np.abs(marginal - np.eye(self.d_in) / self.d_in)) > CHOI_TOL:
            raise NotCPTP("Tr_out(Choi) ≠ I/d_in: el mapa no preserva traza")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    def apply_to(self, rho):
        """N(ρ) = d_in · Tr_in[(ρᵀ ⊗ I) J]."""
        r = np.asarray(rho, dtype=complex)
        big = linalg.kron(r.T, np.eye(self.d_out)) @ self.matrix
        return self.d_in * linalg.partial_trace(big, [self.d_in, self.d_out], [1])


class EbVerdict(enum.Enum):
    EB = "EB"
    NOT_EB = "NotEB"
    INCONCLUSIVE = "Inconclusive"


def as_kraus_map(ch):
    return ch.as_kraus() if isinstance(ch, MeasurePrepareChannel) else ch


def apply(ch, rho):
    r = matrix_of(rho)
    if r.shape[0] != ch.d_in:
        raise DimensionMismatch(f"Estado de dimensión {r.shape[0]}, canal con d_in={ch.d_in}")
    return DensityOperator(ch.apply_to(r))


def apply_on_registers(ch, m, dims, start, count=1, out_dims=None):
    """Aplica el canal sobre los registros contiguos [start, start+count).

    Devuelve la matriz resultante y la nueva lista de dimensiones, en la que el
    bloque de entrada se sustituye por out_dims (por defecto [d_out]).
    """
    dims = [int(d) for d in dims]
    a = np.asarray(m, dtype=complex)
    block = int(np.prod(dims[start:start + count]))
    if block != ch.d_in:
        raise DimensionMismatch(f"Bloque de dimensión {block}, canal con d_in={ch.d_in}")
    out_dims = [ch.d_out] if out_dims is None else [int(d) for d in out_dims]
    if int(np.prod(out_dims)) != ch.d_out:
        raise DimensionMismatch(f"out_dims={out_dims} no multiplica d_out={ch.d_out}")
    left = int(np.prod(dims[:start]))
    right = int(np.prod(dims[start + count:]))
    if a.shape != (left * block * right,) * 2:
        raise DimensionMismatch(f"dims={dims} incompatibles con la matriz {a.shape}")
    t = a.reshape(left, block, right, left, block, right)
    k = ch.stacked
    out = np.einsum("kij,ajbcld,kml->aibcmd", k, t, k.conj(), optimize=True)
    d = left * ch.d_out * right
    return out.reshape(d, d), dims[:start] + out_dims + dims[start + count:]


def apply_on_subsystem(ch, rho, target, dims=None):
    """(id ⊗ N ⊗ id)(ρ) sobre el subsistema target."""
    if dims is None:
        dims = rho.dims if isinstance(rho, DensityOperator) else [matrix_of(rho).shape[0]]
    out, new_dims = apply_on_registers(ch, matrix_of(rho), dims, target)
    return DensityOperator(out, new_dims)


def to_choi(ch):
    k = ch.stacked
    vecs = np.array([op.T.reshape(-1) for op in k])
    return ChoiMatrix(vecs.T @ vecs.conj() / ch.d_in, ch.d_in, ch.d_out)


def from_choi(c):
    """Extrae operadores de Kraus de los autovectores de la Choi sin normalizar."""
    spec = linalg.eigh(c.matrix * c.d_in)
    ops = [
        np.sqrt(lam) * vec.reshape(c.d_in, c.d_out).T
        for lam, vec in zip(spec.eigenvalues, spec.eigenvectors.T)
        if lam >= KRAUS_CUTOFF
    ]
    return KrausChannel(tuple(ops))


def measure_prepare_to_kraus(mp):
    """K_{m,j,k} = √(p_j μ_k) |e_j⟩⟨f_k| a partir de Λ_m = Σ μ_k|f_k⟩⟨f_k|, σ_m = Σ p_j|e_j⟩⟨e_j|."""
    ops = []
    for lam_m, sigma_m in zip(mp.povm.elements, mp.prepared_states):
        ls = linalg.eigh(lam_m)
        ss = linalg.eigh(sigma_m)
        for mu, f in zip(ls.eigenvalues, ls.eigenvectors.T):
            if mu <= 1e-14:
                continue
            for p, e in zip(ss.eigenvalues, ss.eigenvectors.T):
                if p <= 1e-14:
                    continue
                ops.append(np.sqrt(p * mu) * np.outer(e, f.conj()))
    return KrausChannel(tuple(ops))


def is_entanglement_breaking(ch, tol=1e-9):
    """Veredicto de tres valores: PPT sobre la Choi en el corte entrada:salida."""
    if getattr(ch, "is_eb_by_construction", False):
        return EbVerdict.EB
    report = is_ppt(to_choi(ch).matrix, BipartiteCut(ch.d_in, ch.d_out), tol)
    if not report.is_ppt:
        return EbVerdict.NOT_EB
    return EbVerdict.EB if report.conclusive else EbVerdict.INCONCLUSIVE


def choi_min_pt_eigenvalue(ch):
    return is_ppt(to_choi(ch).matrix, BipartiteCut(ch.d_in, ch.d_out), 0.0).min_eigenvalue


def eb_boundary(family, lo, hi, tol=1e-12, max_iter=200):
    """Bisección sobre una familia uniparamétrica con PPT en lo y no-PPT en hi."""
    f_lo = choi_min_pt_eigenvalue(family(lo))
    f_hi = choi_min_pt_eigenvalue(family(hi))
    if not (f_lo >= 0.0 > f_hi):
        raise InvalidParameter(f"El intervalo [{lo}, {hi}] no encierra la frontera EB")
    for _ in range(max_iter):
        if abs(hi - lo) <= tol:
            break
        mid = 0.5 * (lo + hi)
        if choi_min_pt_eigenvalue(family(mid)) >= 0.0:
            lo = mid
        else:
            hi = mid
    logger.debug("[eb] frontera en %.15f", 0.5 * (lo + hi))
    return 0.5 * (lo + hi)


# --- Zoológico de canales ---

def identity(d):
    return KrausChannel((np.eye(d, dtype=complex),))


def replacement(omega, d_in):
    """R_ω(ρ) = Tr(ρ) ω."""
    spec = linalg.eigh(matrix_of(omega))
    ops = []
    for p, e in zip(spec.eigenvalues, spec.eigenvectors.T):
        if p <= 1e-14:
            continue
        for i in range(d_in):
            k = np.zeros((len(e), d_in), dtype=complex)
            k[:, i] = np.sqrt(p) * e
            ops.append(k)
    return KrausChannel(tuple(ops))


def weyl_operators(d):
    """Operadores de Weyl X^a Z^b en dimensión d."""
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [
        np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
        for a in range(d) for b in range(d)
    ]


def depolarizing(lam, d=2):
    """Δ_λ(ρ) = λρ + (1−λ) Tr(ρ) I/d, completamente positivo para λ ∈ [−1/(d²−1), 1]."""
    lower = -1.0 / (d * d - 1)
    if not lower - 1e-15 <= lam <= 1.0 + 1e-15:
        raise InvalidParameter(f"λ={lam} fuera de [{lower:.6f}, 1]")
    weights = np.full(d * d, (1.0 - lam) / (d * d))
    weights[0] += lam
    weights = np.clip(weights, 0.0, None)
    ops = [np.sqrt(w) * w_op for w, w_op in zip(weights, weyl_operators(d)) if w > 0]
    return KrausChannel(tuple(ops))


def dephasing(q):
    """ρ ↦ (1−q)ρ + q ZρZ."""
    if not 0.0 <= q <= 1.0:
        raise InvalidParameter(f"q={q} fuera de [0, 1]")
    z = np.diag([1.0, -1.0]).astype(complex)
    ops = [np.sqrt(1.0 - q) * np.eye(2, dtype=complex), np.sqrt(q) * z]
    return KrausChannel(tuple(op for op, w in zip(ops, (1.0 - q, q)) if w > 0))


def complete_dephasing(d):
    """Desfase total en la base computacional; vuelve clásico un registro."""
    ops = []
    for i in range(d):
        k = np.zeros((d, d), dtype=complex)
        k[i, i] = 1.0
        ops.append(k)
    return KrausChannel(tuple(ops))


def classical_channel(p):
    """Embebe la matriz estocástica por columnas P[y, x] como canal clásico-cuántico."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or np.any(p < 0) or np.max(np.abs(p.sum(axis=0) - 1.0)) > 1e-10:
        raise InvalidParameter("P debe ser estocástica por columnas y no negativa")
    d_out, d_in = p.shape
    ops = []
    for y in range(d_out):
        for x in range(d_in):
            if p[y, x] > 0:
                k = np.zeros((d_out, d_in), dtype=complex)
                k[y, x] = np.sqrt(p[y, x])
                ops.append(k)
    return KrausChannel(tuple(ops))


def binary_symmetric(p):
    if not 0.0 <= p <= 1.0:
        raise InvalidParameter(f"p={p} fuera de [0, 1]")
    return classical_channel([[1.0 - p, p], [p, 1.0 - p]])


def tensor_channels(a, b):
    ops = [np.kron(ka, kb) for ka in a.stacked for kb in b.stacked]
    return KrausChannel(tuple(ops))


def compose(first, second):
    """second ∘ first."""
    if first.d_out != second.d_in:
        raise DimensionMismatch(f"d_out={first.d_out} no coincide con d_in={second.d_in}")
    ops = [k2 @ k1 for k2 in second.stacked for k1 in first.stacked]
    return KrausChannel(tuple(op for op in ops if np.any(np.abs(op) > 1e-15)))


def white_noise(ch, t):
    """t·N + (1−t)·R_{I/d_out}."""
    if not 0.0 <= t <= 1.0:
        raise InvalidParameter(f"t={t} fuera de [0, 1]")
    noise = replacement(np.eye(ch.d_out) / ch.d_out, ch.d_in)
    ops = [np.sqrt(t) * k for k in ch.stacked] + [np.sqrt(1.0 - t) * k for k in noise.stacked]
    return KrausChannel(tuple(op for op in ops if np.any(np.abs(op) > 0)))


def random_channel(d_in, d_out, n_kraus=None, seed=None):
    """Canal aleatorio a partir de una isometría de Haar V: C^{d_in} → C^{d_out·r}."""
    n_kraus = n_kraus or d_in * d_out
    v = linalg.haar_random_isometry(d_out * n_kraus, d_in, seed)
    return KrausChannel(tuple(v[k * d_out:(k + 1) * d_out, :] for k in range(n_kraus)))


def random_eb_channel(d_in, d_out, n_outcomes=3, seed=None):
    rng = linalg.random_generator(seed)
    povm = random_povm(d_in, n_outcomes, rng)
    states = tuple(linalg.random_density(d_out, seed=rng) for _ in range(n_outcomes))
    return MeasurePrepareChannel(povm, states)
