"""Monte Carlo link simulation: channels, modulation, transmission, BER curves.

Two users, two transmit antennas, two receive antennas each.  Entries of
every channel matrix are i.i.d. circularly-symmetric complex Gaussian
with unit variance.  Each transmitted vector is normalized to unit power
(gamma = ||G u||^2 per symbol), so SNR_dB = -10*log10(noise_var) exactly.

The transmitter only ever sees the feedback (exact under perfect CSI,
an encode/decode round trip under quantized feedback); receivers use
their true channel and a genie-known effective gain, with inter-user
interference treated as noise.  Every realization draws its generator
from (master seed, snr index, realization index), so results do not
depend on execution order or worker count.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from .feedback import GmudFeedback, decode, encode
from .precoding import GridSpec, antenna_selection, optimize_gmud, reg_inv

__all__ = [
    "MODULATIONS",
    "SimConfig",
    "ChannelSet",
    "BerPoint",
    "BerCurve",
    "ReceiverInfo",
    "crandn",
    "gen_channels",
    "modulate",
    "demodulate",
    "transmit",
    "receive_detect",
    "run_ber",
]

MODULATIONS = {"qpsk": 2, "16qam": 4}  # bits per symbol

_SCHEMES = ("reg-inv", "reg-inv-sel", "gmud")


def crandn(rng: np.random.Generator, shape) -> np.ndarray:
    """CN(0, 1) samples: real and imaginary parts each of variance 1/2."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)


@dataclass(eq=False)
class ChannelSet:
    """Per-user 2x2 channels plus their exact factorizations (computed lazily)."""

    channels: tuple[np.ndarray, ...]
    _svds: tuple | None = field(default=None, repr=False)

    @property
    def svds(self):
        if self._svds is None:
            from .linalg import svd2x2

            self._svds = tuple(svd2x2(h) for h in self.channels)
        return self._svds


def gen_channels(rng: np.random.Generator, users: int = 2, n_r: int = 2, n_t: int = 2) -> ChannelSet:
    """Draw one i.i.d. Rayleigh channel matrix per user (deterministic in rng)."""
    h = crandn(rng, (users, n_r, n_t))
    return ChannelSet(tuple(h[k] for k in range(users)))


def modulate(bits, modulation: str) -> np.ndarray:
    """Gray-mapped symbols with unit average energy.

    QPSK maps bit pairs (b1, b0) to ((1-2*b1) + 1j*(1-2*b0))/sqrt(2).
    16QAM maps bit quads (a, b, c, d): (a, b) pick the real level and
    (c, d) the imaginary level through the per-axis Gray code
    {00: -3, 01: -1, 11: +1, 10: +3}, scaled by 1/sqrt(10).
    """
    bits = np.asarray(bits, dtype=np.float64)
    bps = MODULATIONS.get(modulation)
    if bps is None:
        raise ValueError(f"unknown modulation {modulation!r}")
    if bits.ndim != 1 or bits.size % bps:
        raise ValueError(f"bit count must be a multiple of {bps}")
    if modulation == "qpsk":
        b1, b0 = bits[0::2], bits[1::2]
        return ((1.0 - 2.0 * b1) + 1j * (1.0 - 2.0 * b0)) / np.sqrt(2.0)
    a, b = bits[0::4], bits[1::4]
    c, d = bits[2::4], bits[3::4]
    re = (2.0 * a - 1.0) * (3.0 - 2.0 * b)
    im = (2.0 * c - 1.0) * (3.0 - 2.0 * d)
    return (re + 1j * im) / np.sqrt(10.0)


def _gray_axis_bits(vals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse per-axis 16QAM Gray map by minimum distance (ties toward |level|=3)."""
    sign_bit = (vals >= 0.0).astype(np.uint8)
    inner_bit = (np.abs(vals) < 2.0).astype(np.uint8)
    return sign_bit, inner_bit


def demodulate(symbols, modulation: str) -> np.ndarray:
    """Minimum-distance hard decisions back to bits (inverse of :func:`modulate`)."""
    z = np.asarray(symbols, dtype=np.complex128)
    if modulation == "qpsk":
        out = np.empty(2 * z.size, dtype=np.uint8)
        out[0::2] = z.real < 0.0
        out[1::2] = z.imag < 0.0
        return out
    if modulation != "16qam":
        raise ValueError(f"unknown modulation {modulation!r}")
    out = np.empty(4 * z.size, dtype=np.uint8)
    out[0::4], out[1::4] = _gray_axis_bits(z.real * np.sqrt(10.0))
    out[2::4], out[3::4] = _gray_axis_bits(z.imag * np.sqrt(10.0))
    return out


def transmit(g: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalize G @ u to unit power per symbol.

    ``u`` holds one column per symbol (or a single vector).  Returns
    (x, gamma) with gamma = ||G u||^2 columnwise and ||x|| = 1.
    """
    s = np.asarray(g) @ np.asarray(u)
    gamma = (s.real**2 + s.imag**2).sum(axis=0)
    if np.any(gamma == 0.0):
        raise ValueError("zero transmit vector: G @ u vanished")
    return s / np.sqrt(gamma), gamma


@dataclass(eq=False)
class ReceiverInfo:
    """Genie side information for coherent detection.

    Steered-beam users rotate their two-antenna observation onto the
    first row of their own triangular-factor representation:
    ``projections[k]`` is the unit vector p1 built from the true channel
    and the transmitter's steering parameters, and ``gains[k]`` the true
    complex coefficient p1^H H_k G[:, k].  The second row (and the
    interference it carries) is discarded.  Inverse-precoding users
    observe the single antenna in ``selection``; ``eff_matrix`` holds
    the true selected rows times G.
    """

    scheme: str
    modulation: str
    projections: tuple[np.ndarray, ...] | None = None
    gains: tuple[complex, ...] | None = None
    eff_matrix: np.ndarray | None = None
    selection: tuple[int, ...] | None = None


def receive_detect(
    channel_set: ChannelSet,
    x: np.ndarray,
    gamma,
    info: ReceiverInfo,
    noise_var: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Add receiver noise, equalize with the genie gain, and slice.

    Steered-beam users project both antennas onto their rotation vector
    p1 and divide by the genie gain; inverse-precoding users observe the
    single scheme antenna and divide by the diagonal effective gain.
    Interference is never cancelled.  Returns hard symbol decisions,
    one row per user.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.complex128).T).T  # (2, T)
    gamma = np.atleast_1d(np.asarray(gamma, dtype=np.float64))
    n_symbols = x.shape[1]
    users = len(channel_set.channels)
    noise = crandn(rng, (users, 2, n_symbols)) * np.sqrt(noise_var)
    root_gamma = np.sqrt(gamma)
    detected = np.empty((users, n_symbols), dtype=np.complex128)
    for k in range(users):
        h = channel_set.channels[k]
        if info.scheme == "gmud":
            y = h @ x + noise[k]
            z = root_gamma * (info.projections[k].conj() @ y) / info.gains[k]
        else:
            row = info.selection[k]
            y = h[row] @ x + noise[k, row]
            z = root_gamma * y / info.eff_matrix[k, k]
        detected[k] = modulate(demodulate(z, info.modulation), info.modulation)
    return detected


@dataclass(frozen=True)
class SimConfig:
    """One BER run: scheme, modulation, SNR grid, feedback mode, sampling plan."""

    scheme: str
    modulation: str = "qpsk"
    snr_db: tuple[float, ...] = (0.0, 10.0, 20.0)
    feedback: str | int = "perfect"
    realizations: int = 400
    symbols: int = 125  # transmit vectors per realization
    seed: int = 12345
    grid: GridSpec = GridSpec()

    def __post_init__(self):
        if self.scheme not in _SCHEMES:
            raise ValueError(f"scheme must be one of {_SCHEMES}")
        if self.modulation not in MODULATIONS:
            raise ValueError(f"modulation must be one of {tuple(MODULATIONS)}")
        if not self.snr_db:
            raise ValueError("snr_db must be nonempty")
        if self.realizations < 1 or self.symbols < 1:
            raise ValueError("realizations and symbols must be >= 1")
        if self.feedback != "perfect" and (not isinstance(self.feedback, int) or self.feedback < 1):
            raise ValueError("feedback must be 'perfect' or a positive integer N")

    @property
    def feedback_bits(self) -> str | int:
        return "perfect" if self.feedback == "perfect" else 12 * self.feedback


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    ber: float
    bits: int
    errors: int
    se: float  # standard error from per-realization clustering


@dataclass(eq=False)
class BerCurve:
    scheme: str
    modulation: str
    feedback: str | int
    points: tuple[BerPoint, ...]

    def ber_at(self, snr_db: float) -> float:
        for p in self.points:
            if p.snr_db == snr_db:
                return p.ber
        raise KeyError(f"no point at {snr_db} dB")


def _perfect_gmud_report(svd) -> GmudFeedback:
    v1 = svd.v[:, 0].copy()
    raw = np.array(
        [v1[0].real, v1[0].imag, v1[1].real, v1[1].imag, svd.lambda1, svd.lambda2]
    )
    return GmudFeedback(raw, v1, svd.lambda1, svd.lambda2)


def _rotation_projection(svd, h: np.ndarray, r: float, theta: float) -> np.ndarray:
    """Receiver rotation vector p1 for the user's own decomposition.

    Built from the true channel and the transmitter's steering choice
    (r clamped into the true singular-value interval, which can differ
    from the quantized one the transmitter searched).  The second left
    vector is re-derived against the beam's second-vector completion
    orthonormal_complement(v1), whose phase differs from the
    convention-fixed svd column, so that p1^H H q1(theta) = r exactly
    and the discarded row never leaks into the decision statistic.
    """
    from .decomposition import solve_rotations
    from .linalg import orthonormal_complement

    r = min(max(r, svd.lambda2), svd.lambda1)
    rot = solve_rotations(svd.lambda1, svd.lambda2, r)
    u1 = svd.u[:, 0]
    if svd.lambda2 <= 1e-12 * svd.lambda1:
        u2 = orthonormal_complement(u1)
    else:
        u2 = (h @ orthonormal_complement(svd.v[:, 0])) / svd.lambda2
        u2 = u2 / np.linalg.norm(u2)
    return rot.a * np.exp(1j * theta) * u1 - rot.b * u2


def _build_link(config: SimConfig, cs: ChannelSet, noise_var: float):
    """Build the precoder from transmitter-visible data plus genie receiver info."""
    quantized = config.feedback != "perfect"
    n = config.feedback if quantized else None

    if config.scheme == "reg-inv":
        if quantized:
            rows = [
                decode(encode(h, "reg-inv", n), "reg-inv", n).row for h in cs.channels
            ]
        else:
            rows = [h[0] for h in cs.channels]
        pre = reg_inv(np.stack(rows), noise_var)
        selection = (0,) * len(cs.channels)
    elif config.scheme == "reg-inv-sel":
        if quantized:
            estimates = [
                decode(encode(h, "reg-inv-sel", n), "reg-inv-sel", n).channel
                for h in cs.channels
            ]
        else:
            estimates = list(cs.channels)
        selection, pre, _ = antenna_selection(estimates, noise_var)
    else:  # gmud
        reports = []
        for svd in cs.svds:
            if quantized:
                reports.append(decode(encode(svd, "gmud", n), "gmud", n))
            else:
                reports.append(_perfect_gmud_report(svd))
        pre, params, _ = optimize_gmud(reports[0], reports[1], noise_var, config.grid)
        projections = tuple(
            _rotation_projection(cs.svds[k], cs.channels[k], r, theta)
            for k, (r, theta) in enumerate(
                ((params.r_k, params.theta_k), (params.r_l, params.theta_l))
            )
        )
        gains = tuple(
            complex(projections[k].conj() @ (cs.channels[k] @ pre.g[:, k]))
            for k in range(len(cs.channels))
        )
        return pre, ReceiverInfo(
            "gmud", config.modulation, projections=projections, gains=gains
        )

    true_rows = np.stack(
        [cs.channels[k][selection[k]] for k in range(len(cs.channels))]
    )
    info = ReceiverInfo(
        config.scheme,
        config.modulation,
        eff_matrix=true_rows @ pre.g,
        selection=tuple(selection),
    )
    return pre, info


def _simulate_point(config: SimConfig, snr_idx: int) -> BerPoint:
    snr_db = config.snr_db[snr_idx]
    noise_var = 10.0 ** (-snr_db / 10.0)
    bps = MODULATIONS[config.modulation]
    bits_per_real = 2 * config.symbols * bps
    err_counts = np.empty(config.realizations, dtype=np.int64)
    for j in range(config.realizations):
        rng = np.random.default_rng([config.seed, snr_idx, j])
        cs = gen_channels(rng)
        pre, info = _build_link(config, cs, noise_var)
        payload = rng.integers(0, 2, size=(2, config.symbols * bps), dtype=np.uint8)
        u = np.stack([modulate(payload[k], config.modulation) for k in range(2)])
        x, gamma = transmit(pre.g, u)
        detected = receive_detect(cs, x, gamma, info, noise_var, rng)
        errs = 0
        for k in range(2):
            errs += int(np.count_nonzero(demodulate(detected[k], config.modulation) != payload[k]))
        err_counts[j] = errs
    total_bits = bits_per_real * config.realizations
    total_errs = int(err_counts.sum())
    p = total_errs / total_bits
    resid = err_counts.astype(np.float64) - p * bits_per_real
    se = float(np.sqrt((resid**2).sum()) / total_bits)
    return BerPoint(float(snr_db), p, total_bits, total_errs, se)


def _point_task(args):
    config, idx = args
    return _simulate_point(config, idx)


def run_ber(config: SimConfig, jobs: int = 1) -> BerCurve:
    """Estimate the BER curve for one scheme/modulation/feedback setting.

    With ``jobs > 1`` the SNR points run in separate processes; results
    are identical to the serial run because every realization derives
    its own generator.
    """
    tasks = [(config, i) for i in range(len(config.snr_db))]
    if jobs > 1 and len(tasks) > 1:
        with multiprocessing.Pool(min(jobs, len(tasks))) as pool:
            points = pool.map(_point_task, tasks)
    else:
        points = [_simulate_point(config, i) for i in range(len(config.snr_db))]
    return BerCurve(config.scheme, config.modulation, config.feedback, tuple(points))
