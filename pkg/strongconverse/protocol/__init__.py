# /strongconverse/protocol/__init__.py
# Simulación de protocolos con retroalimentación clásica y sus verificaciones.

from .decoders import (
    computational_decoder,
    decode,
    helstrom_decoder,
    helstrom_success,
    pgm_decoder,
    success_probability,
    uniform_decoder,
)
from .simulator import (
    FeedbackProtocol,
    ProtocolState,
    Trajectory,
    classical_feedback_decoder,
    codebook_protocol,
    entangling_protocol,
    random_protocol,
    simulate,
)
from .verification import (
    message_information,
    verify_separability,
    verify_strong_converse_bound,
    verify_weak_converse_chain,
)
