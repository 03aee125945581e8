import numpy as np
import pytest

from minrank_pke import f2mat
from minrank_pke.errors import MismatchError
from minrank_pke.minrank import Params
from minrank_pke.pke import (
    Ciphertext, ciphertext_bits, decrypt, decryption_matrix, encrypt, keygen, public_key_bits,
)
from minrank_pke.presets import DESK64


def test_round_trip_desk64(rng):
    kp = keygen(DESK64, rng)
    for _ in range(100):
        assert decrypt(kp, encrypt(kp.pk, 0, rng)) == 0
        assert decrypt(kp.sk, encrypt(kp.pk, 1, rng)) == 1


def test_zero_decryption_matrix_has_low_rank(rng):
    p = Params(32, 3, 2, 8)
    kp = keygen(p, rng)
    for _ in range(50):
        m = decryption_matrix(kp.sk, encrypt(kp.pk, 0, rng))
        assert f2mat.rank(m) <= p.r**2


def test_ciphertext_shape(rng):
    kp = keygen(DESK64, rng)
    ct = encrypt(kp.pk, 0, rng)
    assert ct.k == 4 and ct.t == 16 and len(ct.Cs) == 5
    assert sum(c.rows * c.cols for c in ct.Cs) == ciphertext_bits(DESK64) == 5 * 256
    assert public_key_bits(DESK64) == 5 * 64 * 64


def test_bad_bit(rng):
    kp = keygen(Params(8, 1, 1, 2), rng)
    with pytest.raises(ValueError):
        encrypt(kp.pk, 2, rng)


def test_mismatched_ciphertext(rng):
    kp = keygen(DESK64, rng)
    other = keygen(Params(64, 3, 3, 16), rng)
    with pytest.raises(MismatchError):
        decrypt(kp, encrypt(other.pk, 0, rng))


def test_ciphertext_validation():
    with pytest.raises(Exception):
        Ciphertext(())
    with pytest.raises(Exception):
        Ciphertext((f2mat.BitMatrix.zeros(2), f2mat.BitMatrix.zeros(3)))


def test_tau_zero_breaks_correctness_for_zero(rng):
    # with tau below r^2 some encryptions of 0 fail, showing tau matters
    p = Params(16, 1, 2, 8, tau=0)
    kp = keygen(p, rng)
    fails = sum(decrypt(kp, encrypt(kp.pk, 0, rng)) for _ in range(100))
    assert fails > 0


def test_determinism():
    from minrank_pke.rng import Rng
    a = keygen(DESK64, Rng(5))
    b = keygen(DESK64, Rng(5))
    assert a.pk.Y == b.pk.Y and np.array_equal(a.sk.s, b.sk.s)


def test_wrong_secret_key(rng):
    # Decryption only uses s'. If s' != s, M = <R, Y - A(s')>_t is built from a
    # high-rank matrix and is almost never of rank <= 9. With k = 4 a fresh key
    # shares s with probability 1/16, and then M = <R, E>_t decrypts 0 correctly.
    kp = keygen(DESK64, rng)
    seen_differ = False
    for _ in range(40):
        wrong = keygen(DESK64, rng)
        ones = sum(decrypt(wrong.sk, encrypt(kp.pk, 0, rng)) for _ in range(100))
        if np.array_equal(wrong.sk.s, kp.sk.s):
            assert ones == 0
        else:
            seen_differ = True
            assert ones >= 99
    assert seen_differ
