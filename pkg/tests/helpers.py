import math

import numpy as np

from pbclab.operators import QuantumChannel


def absorb_third_sender(ch: QuantumChannel, theta3: np.ndarray) -> QuantumChannel:
    """Channel A1 A2 -> R3 C that appends theta3 on R3 A3 and applies ``ch`` to A1 A2 A3 (qubits)."""
    lam, vecs = np.linalg.eigh(theta3)
    d_c = ch.d_out
    kraus = []
    for k in ch.kraus:
        kk = k.reshape(d_c, 4, 2)
        for w, v in zip(lam, vecs.T):
            if w <= 1e-15:
                continue
            c = math.sqrt(w) * v.reshape(2, 2)
            kraus.append(np.einsum("rz,caz->rca", c, kk).reshape(2 * d_c, 4))
    return QuantumChannel(tuple(kraus), (2, 2), (2, d_c))
