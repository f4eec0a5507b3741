"""Independent reference computations used to freeze expected values in the
C++ tests. Nothing here imports the evok extension module."""

import struct

MASK64 = (1 << 64) - 1


def splitmix64(state):
    """Yields successive SplitMix64 outputs from `state`."""
    while True:
        state = (state + 0x9E3779B97F4A7C15) & MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        yield z ^ (z >> 31)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    def __init__(self, seed=None, state=None):
        if state is None:
            sm = splitmix64(seed)
            state = [next(sm) for _ in range(4)]
        self.s = list(state)

    def next_u64(self):
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def next_double(self):
        return (self.next_u64() >> 11) * 2.0 ** -53


def crc16_ccitt_false(data):
    crc = 0xFFFF
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            crc = ((crc << 1) ^ 0x1021) if crc & 0x8000 else (crc << 1)
            crc &= 0xFFFF
    return crc


def encode_frame(msg_type, group, sender, seq, ts, bpm, flags, version=1):
    head = struct.pack(">2sBBBIIQHB", b"EV", version, msg_type, group, sender, seq, ts, bpm, flags)
    return head + struct.pack(">H", crc16_ccitt_false(head))


def seq_newer(candidate, last):
    return 1 <= ((candidate - last) % (1 << 32)) < (1 << 31)


def forwarded_count(seed, n, drop):
    """Drop-only channel: one draw per datagram."""
    rng = Xoshiro256StarStar(seed=seed)
    return sum(1 for _ in range(n) if not rng.next_double() < drop)


if __name__ == "__main__":
    print("crc('123456789') = 0x%04X" % crc16_ccitt_false(b"123456789"))
    golden = encode_frame(0, 7, 1, 0, 0, 60, 0)
    print("golden frame:", golden.hex(" "))
    doc = encode_frame(0, 7, 0xDEADBEEF, 42, 123456789, 72, 0)
    print("doc frame:", doc.hex(" "))
    hello = encode_frame(1, 7, 0xDEADBEEF, 0, 1000, 0, 0)
    print("hello frame:", hello.hex(" "))
    x = Xoshiro256StarStar(state=[1, 2, 3, 4])
    print("xoshiro [1,2,3,4]:", [x.next_u64() for _ in range(6)])
    sm = splitmix64(0)
    print("splitmix64(0):", [hex(next(sm)) for _ in range(3)])
    r = Xoshiro256StarStar(seed=42)
    print("seeded 42 u64:", [hex(r.next_u64()) for _ in range(3)])
    r = Xoshiro256StarStar(seed=42)
    print("seeded 42 doubles:", [repr(r.next_double()) for _ in range(3)])
    print("forwarded(seed=42, n=1000, drop=0.2) =", forwarded_count(42, 1000, 0.2))
    print("seq_newer(0, 2**32-1) =", seq_newer(0, 2**32 - 1))
