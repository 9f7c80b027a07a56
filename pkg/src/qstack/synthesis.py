"""Single-qubit z-rotation synthesis over the discrete gate family.

Two-stage approach:

1. A breadth-first database of distinct words over {h, t, tdg, s, sdg}
   (deduplicated up to global phase) answers lookups directly when it
   contains a word within tolerance; among the hits the shortest word
   wins, ties broken lexicographically.
2. Otherwise Solovay-Kitaev recursion refines the database answer with
   balanced group commutators until the tolerance is met or the
   recursion limit is reached.

Internally unitaries live in SU(2) as unit quaternions, where the
spectral-norm distance modulo global phase between two elements is
exactly the chord distance ``min(|p - q|, |p + q|)`` on the 3-sphere.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .gates import Gate, gate_matrix
from .linalg import phase_distance

DEFAULT_DEPTH = 21
CACHE_VERSION = 1

_LETTERS = ("h", "t", "tdg", "s", "sdg")
_ADJOINT_LETTER = {"h": "h", "t": "tdg", "tdg": "t", "s": "sdg", "sdg": "s", "x": "x"}
_DIAG_EXP = {"t": 1, "s": 2, "sdg": 6, "tdg": 7}
_EXP_LETTERS = {
    0: (), 1: ("t",), 2: ("s",), 3: ("s", "t"), 4: ("s", "s"),
    5: ("sdg", "tdg"), 6: ("sdg",), 7: ("tdg",),
}
_LETTER_CODE = {"h": "H", "t": "T", "tdg": "d", "s": "S", "sdg": "z", "x": "X"}
_CODE_LETTER = {v: k for k, v in _LETTER_CODE.items()}


class SynthesisError(ValueError):
    def __init__(self, theta, tolerance, best):
        self.best_distance = best
        super().__init__(
            f"cannot synthesize rz({theta}) to {tolerance}; best achieved {best:.3e}"
        )


@dataclass(frozen=True)
class SynthesisResult:
    word: tuple[str, ...]
    distance: float
    theta: float
    tolerance: float


# quaternion <-> SU(2): q = (w, x, y, z) maps to w*I - i(x*X + y*Y + z*Z)

def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    w1, x1, y1, z1 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    w2, x2, y2, z2 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ],
        axis=-1,
    )


def qconj(q: np.ndarray) -> np.ndarray:
    out = np.array(q, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def su2_to_quat(u: np.ndarray) -> np.ndarray:
    a, b = u[0, 0], u[0, 1]
    return np.array([a.real, -b.imag, -b.real, -a.imag])


def quat_to_su2(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array([[w - 1j * z, -y - 1j * x], [y - 1j * x, w + 1j * z]])


def to_su2(u: np.ndarray) -> np.ndarray:
    return u / np.sqrt(np.linalg.det(u).astype(complex))


def quat_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Spectral-norm distance modulo phase between the two SU(2) elements."""
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * abs(float(np.dot(p, q))))))


def rz_quat(theta: float) -> np.ndarray:
    return np.array([np.cos(theta / 2.0), 0.0, 0.0, np.sin(theta / 2.0)])


_LETTER_QUAT = {name: su2_to_quat(to_su2(gate_matrix(Gate(name)))) for name in _LETTERS}
_LETTER_QUAT["x"] = su2_to_quat(to_su2(gate_matrix(Gate("x"))))


def word_quat(word) -> np.ndarray:
    q = np.array([1.0, 0.0, 0.0, 0.0])
    for letter in word:
        q = qmul(_LETTER_QUAT[letter], q)
    return q


def word_matrix(word) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    for letter in word:
        m = gate_matrix(Gate(letter)) @ m
    return m


def adjoint_word(word) -> tuple[str, ...]:
    return tuple(_ADJOINT_LETTER[letter] for letter in reversed(word))


def simplify_word(word) -> tuple[str, ...]:
    """Collapse diagonal runs mod t^8 = 1 and cancel h h / x x pairs."""
    letters = list(word)
    while True:
        out: list[str] = []
        exp = 0
        for letter in letters + ["\0"]:
            if letter in _DIAG_EXP:
                exp = (exp + _DIAG_EXP[letter]) % 8
                continue
            out.extend(_EXP_LETTERS[exp])
            exp = 0
            if letter == "\0":
                break
            if out and out[-1] == letter and letter in ("h", "x"):
                out.pop()
            else:
                out.append(letter)
        if out == letters:
            return tuple(out)
        letters = out


def _canonical_signs(quats: np.ndarray) -> np.ndarray:
    """Flip each quaternion so its first significant component is positive."""
    sign = np.zeros(len(quats))
    for col in range(4):
        undecided = sign == 0.0
        vals = quats[undecided, col]
        sign[undecided] = np.where(vals > 1e-8, 1.0, np.where(vals < -1e-8, -1.0, 0.0))
    sign[sign == 0.0] = 1.0
    return quats * sign[:, None]


def _row_keys(quats: np.ndarray) -> list[bytes]:
    rounded = np.ascontiguousarray(np.round(_canonical_signs(quats), 9)) + 0.0
    data = rounded.tobytes()
    return [data[i * 32 : (i + 1) * 32] for i in range(len(quats))]


class SynthesisDatabase:
    """Deduplicated word table sorted by (word length, word)."""

    def __init__(self, depth: int, words: list[tuple[str, ...]], quats: np.ndarray):
        order = sorted(range(len(words)), key=lambda i: (len(words[i]), words[i]))
        self.depth = depth
        self.words = [words[i] for i in order]
        self.quats = np.ascontiguousarray(quats[order])

    def __len__(self) -> int:
        return len(self.words)

    def nearest(self, target: np.ndarray) -> tuple[tuple[str, ...], np.ndarray, float]:
        scores = np.abs(self.quats @ target)
        i = int(np.argmax(scores))
        dist = float(np.sqrt(max(0.0, 2.0 - 2.0 * scores[i])))
        return self.words[i], self.quats[i], dist

    def shortest_within(self, target: np.ndarray, eps: float, limit: int = 50):
        """Up to `limit` candidate words at distance <= eps, shortest first.

        The threshold carries slack because the quaternion dot product
        resolves distances only down to about sqrt(machine epsilon);
        callers confirm candidates against exact matrices.
        """
        scores = np.abs(self.quats @ target)
        mask = scores >= 1.0 - eps * eps / 2.0 - 1e-14
        idx = np.nonzero(mask)[0][:limit]
        return [self.words[i] for i in idx]

    def covering_radius_estimate(self, samples: int = 300, seed: int = 0) -> float:
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(samples):
            v = rng.normal(size=4)
            v /= np.linalg.norm(v)
            worst = max(worst, self.nearest(v)[2])
        return worst

    def save(self, path: Path) -> None:
        coded = ["".join(_LETTER_CODE[l] for l in w) for w in self.words]
        np.savez_compressed(
            path,
            version=np.array([CACHE_VERSION]),
            depth=np.array([self.depth]),
            quats=self.quats,
            words=np.array(coded),
        )

    @classmethod
    def load(cls, path: Path):
        with np.load(path, allow_pickle=False) as data:
            if int(data["version"][0]) != CACHE_VERSION:
                return None
            words = [tuple(_CODE_LETTER[ch] for ch in s) for s in data["words"]]
            return cls(int(data["depth"][0]), words, data["quats"])


def build_database(depth: int = DEFAULT_DEPTH) -> SynthesisDatabase:
    """Breadth-first enumeration of words up to the given letter depth."""
    identity = np.array([[1.0, 0.0, 0.0, 0.0]])
    seen: set[bytes] = set(_row_keys(identity))
    words: list[tuple[str, ...]] = [()]
    quats = [identity[0]]

    frontier_q = identity
    frontier_w: list[tuple[str, ...]] = [()]
    for _ in range(depth):
        cand_q = []
        cand_w = []
        for letter in _LETTERS:
            gen = _LETTER_QUAT[letter]
            cand_q.append(qmul(gen[None, :], frontier_q))
            cand_w.extend(w + (letter,) for w in frontier_w)
        cand_q = np.concatenate(cand_q, axis=0)
        keys = _row_keys(cand_q)
        keep = []
        for i, key in enumerate(keys):
            if key not in seen:
                seen.add(key)
                keep.append(i)
        if not keep:
            break
        frontier_q = cand_q[keep]
        frontier_w = [cand_w[i] for i in keep]
        words.extend(frontier_w)
        quats.extend(frontier_q)
    return SynthesisDatabase(depth, words, np.array(quats))


_db_cache: dict[int, SynthesisDatabase] = {}


def default_cache_dir() -> Path:
    return Path(os.environ.get("QSTACK_CACHE_DIR", "~/.cache/qstack")).expanduser()


def get_database(depth: int = DEFAULT_DEPTH, cache_dir: Path | None = None) -> SynthesisDatabase:
    if depth in _db_cache:
        return _db_cache[depth]
    cache_dir = default_cache_dir() if cache_dir is None else Path(cache_dir)
    cache_file = cache_dir / f"rzwords-v{CACHE_VERSION}-d{depth}.npz"
    db = None
    if cache_file.exists():
        try:
            db = SynthesisDatabase.load(cache_file)
        except Exception:
            db = None
    if db is None:
        db = build_database(depth)
        try:
            cache_dir.mkdir(parents=True, exist_ok=True)
            db.save(cache_file)
        except OSError:
            pass
    _db_cache[depth] = db
    return db


def _axis(q: np.ndarray) -> np.ndarray:
    v = q[1:]
    n = np.linalg.norm(v)
    if n < 1e-300:
        return np.array([1.0, 0.0, 0.0])
    return v / n


def gc_decompose(delta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Balanced group commutator: delta = V W V^dag W^dag (all SU(2)).

    V and W are rotations by the same angle phi about conjugated x/y axes,
    with sin(theta/2) = 2 sin^2(phi/2) sqrt(1 - sin^4(phi/2)) so the
    commutator's rotation angle matches delta's.
    """
    if delta[0] < 0:
        delta = -delta
    w = float(np.clip(delta[0], -1.0, 1.0))
    theta = 2.0 * np.arccos(w)
    if theta < 1e-12:
        e = np.array([1.0, 0.0, 0.0, 0.0])
        return e, e.copy()

    phi = 2.0 * np.arcsin(np.sqrt(np.sin(theta / 4.0)))
    c, s = np.cos(phi / 2.0), np.sin(phi / 2.0)
    v = np.array([c, s, 0.0, 0.0])
    u = np.array([c, 0.0, s, 0.0])
    g = qmul(qmul(v, u), qmul(qconj(v), qconj(u)))
    if g[0] < 0:
        g = -g

    m = _axis(g)
    n = _axis(delta)
    cross = np.cross(m, n)
    dot = float(np.clip(np.dot(m, n), -1.0, 1.0))
    norm = np.linalg.norm(cross)
    if norm < 1e-12:
        if dot > 0:
            conj = np.array([1.0, 0.0, 0.0, 0.0])
        else:
            perp = np.cross(m, [1.0, 0.0, 0.0])
            if np.linalg.norm(perp) < 1e-6:
                perp = np.cross(m, [0.0, 1.0, 0.0])
            perp /= np.linalg.norm(perp)
            conj = np.concatenate([[0.0], perp])
    else:
        ang = np.arccos(dot)
        conj = np.concatenate([[np.cos(ang / 2.0)], np.sin(ang / 2.0) * cross / norm])
    v_t = qmul(qmul(conj, v), qconj(conj))
    u_t = qmul(qmul(conj, u), qconj(conj))
    return v_t, u_t


def _sk(db: SynthesisDatabase, target: np.ndarray, n: int) -> tuple[tuple[str, ...], np.ndarray]:
    if n == 0:
        word, q, _ = db.nearest(target)
        return word, q
    word1, q1 = _sk(db, target, n - 1)
    delta = qmul(target, qconj(q1))
    v, w = gc_decompose(delta)
    vw_word, vq = _sk(db, v, n - 1)
    ww_word, wq = _sk(db, w, n - 1)
    # operator product V W V^dag W^dag U1; circuit order is reversed
    word = word1 + adjoint_word(ww_word) + adjoint_word(vw_word) + ww_word + vw_word
    q = qmul(qmul(vq, wq), qmul(qconj(vq), qmul(qconj(wq), q1)))
    return word, q


def synthesize_rz(
    theta: float,
    eps: float,
    db: SynthesisDatabase | None = None,
    max_recursion: int = 8,
) -> SynthesisResult:
    """Word over {h, t, tdg, s, sdg, x} within ``eps`` of rz(theta), modulo phase.

    The reported distance is recomputed from the emitted word's matrices.
    """
    if eps <= 0:
        raise ValueError("tolerance must be positive")
    if db is None:
        db = get_database()
    target_matrix = gate_matrix(Gate("rz", float(theta)))
    target = rz_quat(float(theta))

    def verified(word) -> tuple[tuple[str, ...], float]:
        word = simplify_word(word)
        return word, phase_distance(word_matrix(word), target_matrix)

    best = db.nearest(target)[2]
    for candidate in db.shortest_within(target, eps):
        word, dist = verified(candidate)
        best = min(best, dist)
        if dist <= eps:
            return SynthesisResult(word, dist, float(theta), eps)

    for n in range(1, max_recursion + 1):
        word, q = _sk(db, target, n)
        gap = quat_distance(q, target)
        # the quaternion gap bottoms out near sqrt(machine eps); confirm
        # small gaps against the exact word matrices
        if gap <= max(eps, 3e-8):
            word, dist = verified(word)
            best = min(best, dist)
            if dist <= eps:
                return SynthesisResult(word, dist, float(theta), eps)
        else:
            best = min(best, gap)
    raise SynthesisError(theta, eps, best)
