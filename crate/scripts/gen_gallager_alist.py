"""Search for a (12,3,4) Gallager-style parity-check matrix on which
sum-product decoding corrects every single bit flip at high LLR magnitude,
and print it in alist format."""
import itertools
import math
import random
import sys

N, WC, WR = 12, 3, 4
M = N * WC // WR
LLR = 8.0


def build(perms):
    rows = []
    for perm in perms:
        for r in range(N // WR):
            rows.append(sorted(perm[c] for c in range(r * WR, (r + 1) * WR)))
    return rows


def codewords(rows):
    out = []
    for v in range(1 << N):
        bits = [(v >> i) & 1 for i in range(N)]
        if all(sum(bits[c] for c in r) % 2 == 0 for r in rows):
            out.append(bits)
    return out


def bp(rows, llr, iters=25):
    edges = [(r, c) for r, row in enumerate(rows) for c in row]
    q = {e: llr[e[1]] for e in edges}
    for it in range(1, iters + 1):
        rmsg = {}
        for r, row in enumerate(rows):
            for c in row:
                prod = 1.0
                for c2 in row:
                    if c2 != c:
                        prod *= math.tanh(q[(r, c2)] / 2)
                prod = max(min(prod, 1 - 1e-15), -1 + 1e-15)
                rmsg[(r, c)] = 2 * math.atanh(prod)
        total = list(llr)
        for (r, c), v in rmsg.items():
            total[c] += v
        for e in edges:
            q[e] = total[e[1]] - rmsg[e]
        hard = [1 if t < 0 else 0 for t in total]
        if all(sum(hard[c] for c in row) % 2 == 0 for row in rows):
            return hard, True
    return hard, False


def corrects_all(rows):
    for cw in codewords(rows):
        for flip in range(N):
            llr = [(-LLR if b else LLR) for b in cw]
            llr[flip] = -llr[flip]
            hard, ok = bp(rows, llr)
            if not ok or hard != cw:
                return False
    return True


def main(seed=1):
    rng = random.Random(seed)
    ident = list(range(N))
    for _ in range(2000):
        p2, p3 = ident[:], ident[:]
        rng.shuffle(p2)
        rng.shuffle(p3)
        rows = build([ident, p2, p3])
        if len(codewords(rows)) >= 16 and corrects_all(rows):
            break
    else:
        sys.exit("no suitable matrix found")
    cols = [[i for i, r in enumerate(rows) if c in r] for c in range(N)]
    out = [f"{N} {M}", f"{WC} {WR}", " ".join([str(WC)] * N), " ".join([str(WR)] * M)]
    out += [" ".join(str(i + 1) for i in col) for col in cols]
    out += [" ".join(str(c + 1) for c in row) for row in rows]
    print("\n".join(out))


if __name__ == "__main__":
    main()
