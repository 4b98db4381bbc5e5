# /strongconverse/protocol/simulator.py
# Simulación exacta, mensaje a mensaje, de protocolos de n rondas con
# retroalimentación clásica de Bob hacia Alice.

import logging
from dataclasses import dataclass, field

import numpy as np

from .. import linalg
from ..channels import (
    KrausChannel,
    apply_on_registers,
    as_kraus_map,
    complete_dephasing,
    compose,
    identity,
    random_channel,
    tensor_channels,
)
from ..errors import DimensionCap, DimensionMismatch, InvalidParameter, NotCPTP, StateInvalid
from ..optimize import parallel_map
from ..states import Ensemble, Povm, cq_state, matrix_of, projector, random_ensemble, random_pure_state

logger = logging.getLogger(__name__)

MAX_JOINT_DIM = 2 ** 12
MAX_FEEDBACK_DIM = 4
TP_TOL = 1e-8
NEGATIVITY_TOL = 1e-7

ALICE, BOB = "A", "B"


def classical_feedback_decoder(decoder, x_dim):
    """(Δ_X ⊗ id_B′) ∘ D: el registro X_i sale diagonal en la base computacional."""
    if decoder.d_out % x_dim:
        raise DimensionMismatch(f"d_out={decoder.d_out} no es múltiplo de |X|={x_dim}")
    if x_dim == 1:
        return decoder
    dephase = tensor_channels(complete_dephasing(x_dim), identity(decoder.d_out // x_dim))
    return compose(as_kraus_map(decoder), dephase)


def _check_tp(ch, name):
    deviation = as_kraus_map(ch).tp_deviation()
    if deviation > TP_TOL:
        raise NotCPTP(f"{name}: Σ K†K difiere de la identidad en {deviation:.3e}")


def _dephase_first(m, d_x, d_rest):
    """Anula las coherencias del primer registro (dimensión d_x)."""
    t = np.asarray(m, dtype=complex).reshape(d_x, d_rest, d_x, d_rest)
    mask = np.eye(d_x)[:, None, :, None]
    return (t * mask).reshape(d_x * d_rest, d_x * d_rest)


@dataclass(frozen=True, eq=False)
class FeedbackProtocol:
    """Protocolo de n rondas con L mensajes y retroalimentación clásica.

    Ronda i (1..n): Alice aplica E^i: A′_{i−1}⊗X_{i−1} → A′_i⊗A_i, el canal
    lleva A_i a B_i y, salvo en la última ronda, Bob aplica
    D^i: B_i⊗B′_{i−1} → X_i⊗B′_i y envía X_i. Al final Bob mide B_n⊗B′_{n−1}.
    """
    channel: object
    n_rounds: int
    messages: int
    feedback_dims: tuple
    alice_dims: tuple
    bob_dims: tuple
    initial_alice: tuple
    initial_bob: np.ndarray
    encoders: tuple
    decoders: tuple = ()
    final_povm: Povm = None
    separable_inputs: bool = False

    def __post_init__(self):
        n, L = int(self.n_rounds), int(self.messages)
        if n < 1 or L < 2:
            raise InvalidParameter(f"Se requiere n ≥ 1 y L ≥ 2 (n={n}, L={L})")
        fx = tuple(int(d) for d in self.feedback_dims)
        da = tuple(int(d) for d in self.alice_dims)
        db = tuple(int(d) for d in self.bob_dims)
        if len(fx) != n or len(da) != n + 1 or len(db) != n:
            raise DimensionMismatch("feedback_dims y bob_dims tienen n entradas, alice_dims n+1")
        if len(self.encoders) != n or len(self.decoders) != n - 1:
            raise DimensionMismatch("Se esperan n codificadores y n−1 decodificadores")
        if max(fx) > MAX_FEEDBACK_DIM:
            raise DimensionCap(f"Alfabeto de retroalimentación {max(fx)} > {MAX_FEEDBACK_DIM}")
        if len(self.initial_alice) != L:
            raise DimensionMismatch(f"Se esperan {L} estados iniciales de Alice")

        ch = self.channel
        _check_tp(ch, "canal")
        for i, enc in enumerate(self.encoders, start=1):
            _check_tp(enc, f"E^{i}")
            if enc.d_in != da[i - 1] * fx[i - 1] or enc.d_out != da[i] * ch.d_in:
                raise DimensionMismatch(f"E^{i} tiene dimensiones {enc.d_in}→{enc.d_out}")
        decoders = []
        for i, dec in enumerate(self.decoders, start=1):
            _check_tp(dec, f"D^{i}")
            if dec.d_in != ch.d_out * db[i - 1] or dec.d_out != fx[i] * db[i]:
                raise DimensionMismatch(f"D^{i} tiene dimensiones {dec.d_in}→{dec.d_out}")
            decoders.append(classical_feedback_decoder(dec, fx[i]))

        alice = []
        for m, s in enumerate(self.initial_alice):
            s = linalg.check_hermitian(matrix_of(s))
            if s.shape != (da[0], da[0]) or abs(np.trace(s).real - 1.0) > 1e-9:
                raise StateInvalid(f"Estado inicial de Alice para m={m} inválido")
            alice.append(s)
        bob = linalg.check_hermitian(matrix_of(self.initial_bob))
        if bob.shape != (fx[0] * db[0],) * 2 or abs(np.trace(bob).real - 1.0) > 1e-9:
            raise StateInvalid("Estado inicial de Bob (X_0 ⊗ B′_0) inválido")
        bob = _dephase_first(bob, fx[0], db[0])

        if self.final_povm is not None and self.final_povm.dim != ch.d_out * db[n - 1]:
            raise DimensionMismatch("El POVM final debe actuar sobre B_n ⊗ B′_{n−1}")
        widest = max(self.stage_dims())
        if widest > MAX_JOINT_DIM:
            raise DimensionCap(f"Dimensión conjunta {widest} supera {MAX_JOINT_DIM}")

        object.__setattr__(self, "n_rounds", n)
        object.__setattr__(self, "messages", L)
        object.__setattr__(self, "feedback_dims", fx)
        object.__setattr__(self, "alice_dims", da)
        object.__setattr__(self, "bob_dims", db)
        object.__setattr__(self, "initial_alice", tuple(alice))
        object.__setattr__(self, "initial_bob", bob)
        object.__setattr__(self, "decoders", tuple(decoders))

    @property
    def rate(self):
        return float(np.log2(self.messages) / self.n_rounds)

    def stage_dims(self):
        fx, da, db = self.feedback_dims, self.alice_dims, self.bob_dims
        d_a, d_b = self.channel.d_in, self.channel.d_out
        dims = []
        for i in range(1, self.n_rounds + 1):
            dims.append(int(da[i - 1]) * int(fx[i - 1]) * int(db[i - 1]))
            dims.append(int(da[i]) * d_a * int(db[i - 1]))
            dims.append(int(da[i]) * d_b * int(db[i - 1]))
            if i < self.n_rounds:
                dims.append(int(da[i]) * int(fx[i]) * int(db[i]))
        return dims


@dataclass(frozen=True, eq=False)
class ProtocolState:
    """Estados condicionales ρ^m sobre los registros actuales."""
    states: tuple
    labels: tuple
    dims: tuple
    owners: tuple
    round_index: int
    stage: str

    @property
    def bob_registers(self):
        return [k for k, o in enumerate(self.owners) if o == BOB]

    @property
    def alice_registers(self):
        return [k for k, o in enumerate(self.owners) if o == ALICE]

    def bob_states(self):
        keep = self.bob_registers
        return tuple(linalg.partial_trace(s, self.dims, keep) for s in self.states)

    def joint_with_message(self):
        """Σ_m (1/L) |m⟩⟨m| ⊗ ρ^m con el registro M en la posición 0."""
        L = len(self.states)
        joint = cq_state(Ensemble(np.full(L, 1.0 / L), self.states)).matrix
        return joint, (L,) + tuple(self.dims)


@dataclass
class Trajectory:
    protocol: FeedbackProtocol
    steps: list = field(default_factory=list)

    @property
    def final(self):
        return self.steps[-1]


def _check_state(m, where):
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    if w[0] < -NEGATIVITY_TOL:
        raise StateInvalid(f"{where}: autovalor mínimo {w[0]:.3e}")


def _evolve_message(p, m):
    """Estados de un mensaje tras cada etapa, con sus etiquetas y dueños."""
    rho = np.kron(p.initial_alice[m], p.initial_bob)
    dims = [p.alice_dims[0], p.feedback_dims[0], p.bob_dims[0]]
    labels = ["A'0", "X0", "B'0"]
    owners = [ALICE, ALICE, BOB]
    steps = [(rho, list(dims), list(labels), list(owners), 0, "inicial")]
    for i in range(1, p.n_rounds + 1):
        rho, dims = apply_on_registers(
            p.encoders[i - 1], rho, dims, 0, count=2, out_dims=[p.alice_dims[i], p.channel.d_in],
        )
        labels = [f"A'{i}", f"A{i}", labels[2]]
        owners = [ALICE, ALICE, BOB]
        _check_state(rho, f"m={m} ronda {i} codificador")
        steps.append((rho, dims, labels, owners, i, "codificador"))

        rho, dims = apply_on_registers(p.channel, rho, dims, 1)
        labels = [labels[0], f"B{i}", labels[2]]
        owners = [ALICE, BOB, BOB]
        _check_state(rho, f"m={m} ronda {i} canal")
        steps.append((rho, dims, labels, owners, i, "canal"))

        if i < p.n_rounds:
            rho, dims = apply_on_registers(
                p.decoders[i - 1], rho, dims, 1, count=2, out_dims=[p.feedback_dims[i], p.bob_dims[i]],
            )
            labels = [labels[0], f"X{i}", f"B'{i}"]
            owners = [ALICE, ALICE, BOB]
            _check_state(rho, f"m={m} ronda {i} decodificador")
            steps.append((rho, dims, labels, owners, i, "decodificador"))
    return steps


def simulate(p):
    """Evoluciona los L estados condicionales; devuelve (estado final, trayectoria)."""
    per_message = parallel_map(lambda m: _evolve_message(p, m), range(p.messages))
    trajectory = Trajectory(protocol=p)
    for k, (_, dims, labels, owners, round_index, stage) in enumerate(per_message[0]):
        trajectory.steps.append(ProtocolState(
            states=tuple(steps[k][0] for steps in per_message),
            labels=tuple(labels),
            dims=tuple(int(d) for d in dims),
            owners=tuple(owners),
            round_index=round_index,
            stage=stage,
        ))
    logger.debug("[protocolo] %d rondas, %d mensajes, %d etapas", p.n_rounds, p.messages, len(trajectory.steps))
    return trajectory.final, trajectory


# ---------------------- Constructores de protocolos ------------------

def codebook_protocol(ch, codebook, separable_inputs=False):
    """Protocolo sin retroalimentación: en la ronda i Alice envía |c_{m,i}⟩.

    Bob guarda cada salida en su memoria, de modo que al final mide el
    registro completo B_n⊗B_{n−1}⊗…⊗B_1.
    """
    codebook = np.asarray(codebook, dtype=int)
    if codebook.ndim == 1:
        codebook = codebook[:, None]
    L, n = codebook.shape
    d_in, d_out = ch.d_in, ch.d_out
    if codebook.min() < 0 or codebook.max() >= d_in:
        raise InvalidParameter(f"Las palabras del código deben estar en [0, {d_in})")
    encoders = []
    for i in range(n):
        ops = []
        for m in range(L):
            k = np.zeros((L * d_in, L), dtype=complex)
            k[m * d_in + codebook[m, i], m] = 1.0
            ops.append(k)
        encoders.append(KrausChannel(tuple(ops)))
    bob_dims = tuple(d_out ** i for i in range(n))
    decoders = tuple(identity(d_out * bob_dims[i - 1]) for i in range(1, n))
    return FeedbackProtocol(
        channel=ch,
        n_rounds=n,
        messages=L,
        feedback_dims=(1,) * n,
        alice_dims=(L,) * (n + 1),
        bob_dims=bob_dims,
        initial_alice=tuple(projector(np.eye(L)[m]) for m in range(L)),
        initial_bob=np.ones((1, 1), dtype=complex),
        encoders=tuple(encoders),
        decoders=decoders,
        separable_inputs=separable_inputs,
    )


def _bell_vector(m):
    """(I ⊗ Z^m)|Φ⁺⟩ en 2×2."""
    v = np.array([1.0, 0.0, 0.0, (-1.0) ** m], dtype=complex)
    return v / np.sqrt(2.0)


def entangling_protocol(ch, n_rounds=1):
    """Caso de control: el codificador comparte un par de Bell entre A′_i y A_i.

    Sobre un canal que no rompe entrelazamiento el estado A′:B deja de ser PPT.
    """
    if ch.d_in != 2:
        raise DimensionMismatch("El protocolo entrelazante requiere un canal con d_in = 2")
    # K_m = |Φ_m⟩⟨m|: mide A′_{i−1} y prepara (I⊗Z^m)|Φ⁺⟩ en A′_i⊗A_i
    ops = []
    for m in range(2):
        k = np.zeros((4, 2), dtype=complex)
        k[:, m] = _bell_vector(m)
        ops.append(k)
    encoder = KrausChannel(tuple(ops))
    d_out = ch.d_out
    bob_dims = (1,) + (d_out,) * (n_rounds - 1)
    decoders = []
    for i in range(1, n_rounds):
        # Guarda B_i y descarta B′_{i−1}
        mem = bob_dims[i - 1]
        keep = [np.kron(np.eye(d_out), np.eye(mem)[j][None, :]) for j in range(mem)]
        decoders.append(KrausChannel(tuple(keep)))
    return FeedbackProtocol(
        channel=ch,
        n_rounds=n_rounds,
        messages=2,
        feedback_dims=(1,) * n_rounds,
        alice_dims=(2,) * (n_rounds + 1),
        bob_dims=bob_dims,
        initial_alice=(projector([1, 0]), projector([0, 1])),
        initial_bob=np.ones((1, 1), dtype=complex),
        encoders=(encoder,) * n_rounds,
        decoders=tuple(decoders),
    )


def _random_map(d_in, d_out, seed):
    # La dilatación necesita d_out·r ≥ d_in
    return random_channel(d_in, d_out, n_kraus=max(2, -(-d_in // d_out)), seed=seed)


def random_protocol(ch, n_rounds, messages, dims=None, seed=None, separable_inputs=False):
    """Protocolo aleatorio: codificadores y decodificadores por dilatación de Haar.

    dims admite las claves "alice", "bob" y "feedback" (dimensiones uniformes
    por ronda, por defecto 2).
    """
    dims = dict(dims or {})
    d_mem_a = int(dims.get("alice", 2))
    d_mem_b = int(dims.get("bob", 2))
    d_x = int(dims.get("feedback", 2))
    if d_x > MAX_FEEDBACK_DIM:
        raise DimensionCap(f"Alfabeto de retroalimentación {d_x} > {MAX_FEEDBACK_DIM}")
    if min(d_mem_a, d_mem_b, d_x) < 1:
        raise InvalidParameter("Las dimensiones deben ser positivas")
    widest = d_mem_a * max(ch.d_in, ch.d_out, d_x) * d_mem_b
    if widest > MAX_JOINT_DIM:
        raise DimensionCap(f"Dimensión conjunta {widest} supera {MAX_JOINT_DIM}")

    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    s_alice, s_bob, s_enc, s_dec = ss.spawn(4)
    alice_seeds = s_alice.spawn(messages)
    initial_alice = tuple(projector(random_pure_state(d_mem_a, s)) for s in alice_seeds)
    bob_ens = random_ensemble(d_mem_b, d_x, seed=s_bob)
    initial_bob = cq_state(bob_ens).matrix
    fx = (d_x,) * n_rounds
    da = (d_mem_a,) * (n_rounds + 1)
    db = (d_mem_b,) * n_rounds
    enc_seeds = s_enc.spawn(n_rounds)
    encoders = tuple(
        _random_map(da[i] * fx[i], da[i + 1] * ch.d_in, enc_seeds[i])
        for i in range(n_rounds)
    )
    dec_seeds = s_dec.spawn(max(n_rounds - 1, 1))
    decoders = tuple(
        _random_map(ch.d_out * db[i - 1], fx[i] * db[i], dec_seeds[i - 1])
        for i in range(1, n_rounds)
    )
    return FeedbackProtocol(
        channel=ch,
        n_rounds=n_rounds,
        messages=messages,
        feedback_dims=fx,
        alice_dims=da,
        bob_dims=db,
        initial_alice=initial_alice,
        initial_bob=initial_bob,
        encoders=encoders,
        decoders=decoders,
        separable_inputs=separable_inputs,
    )
