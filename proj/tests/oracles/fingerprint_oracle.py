"""Independent circular-fingerprint oracle.

Graphs are written out by hand (element numbers, charges, aromatic flags and
bond lists) so the C++ SMILES parser is not involved. Prints the sparse ECFC
count vector for each molecule as C++ initializer lists; the output is frozen
into tests/test_fingerprint.cpp.
"""

from collections import deque

MASK = (1 << 64) - 1
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
ORDER = {"-": 1, "=": 2, "#": 3, ":": 4}


def fnv(words):
    h = FNV_OFFSET
    for w in words:
        for b in (w & MASK).to_bytes(8, "little"):
            h ^= b
            h = (h * FNV_PRIME) & MASK
    return h


def identifiers(atoms, bonds, radius=2):
    """atoms: list of (Z, charge, aromatic); bonds: list of (i, j, symbol)."""
    n = len(atoms)
    adj = [[] for _ in range(n)]
    for i, j, s in bonds:
        adj[i].append((j, ORDER[s]))
        adj[j].append((i, ORDER[s]))

    def ecc(s):
        seen = {s: 0}
        q = deque([s])
        while q:
            u = q.popleft()
            for v, _ in adj[u]:
                if v not in seen:
                    seen[v] = seen[u] + 1
                    q.append(v)
        return max(seen.values())

    reach = [ecc(i) for i in range(n)]
    cur = [fnv([z, len(adj[i]), c, int(a)]) for i, (z, c, a) in enumerate(atoms)]
    out = list(cur)
    for r in range(1, radius + 1):
        nxt = []
        for i in range(n):
            env = sorted((o, cur[j]) for j, o in adj[i])
            words = [cur[i]]
            for o, h in env:
                words += [o, h]
            nxt.append(fnv(words))
        cur = nxt
        out += [cur[i] for i in range(n) if reach[i] >= r]
    return out


def counts(ids):
    slots = {}
    for h in ids:
        slots[h % 256] = slots.get(h % 256, 0) + 1
    return sorted(slots.items())


C, N, O, S, Cl = 6, 7, 8, 16, 17
MOLECULES = {
    "C": ([(C, 0, False)], []),
    "CCO": ([(C, 0, False), (C, 0, False), (O, 0, False)], [(0, 1, "-"), (1, 2, "-")]),
    "CCN": ([(C, 0, False), (C, 0, False), (N, 0, False)], [(0, 1, "-"), (1, 2, "-")]),
    "C1CC1": ([(C, 0, False)] * 3, [(0, 1, "-"), (1, 2, "-"), (2, 0, "-")]),
    "CC(=O)O": (
        [(C, 0, False), (C, 0, False), (O, 0, False), (O, 0, False)],
        [(0, 1, "-"), (1, 2, "="), (1, 3, "-")],
    ),
    "c1ccccc1": ([(C, 0, True)] * 6, [(i, (i + 1) % 6, ":") for i in range(6)]),
    "C[N+](C)(C)C": (
        [(C, 0, False), (N, 1, False), (C, 0, False), (C, 0, False), (C, 0, False)],
        [(0, 1, "-"), (1, 2, "-"), (1, 3, "-"), (1, 4, "-")],
    ),
    "CC#N": ([(C, 0, False), (C, 0, False), (N, 0, False)], [(0, 1, "-"), (1, 2, "#")]),
    "c1ccsc1Cl": (
        [(C, 0, True), (C, 0, True), (C, 0, True), (S, 0, True), (C, 0, True), (Cl, 0, False)],
        [(0, 1, ":"), (1, 2, ":"), (2, 3, ":"), (3, 4, ":"), (4, 0, ":"), (4, 5, "-")],
    ),
    "[O-]CCCCCC": (
        [(O, -1, False)] + [(C, 0, False)] * 6,
        [(i, i + 1, "-") for i in range(6)],
    ),
}

if __name__ == "__main__":
    print("// id of a lone carbon:", hex(fnv([6, 0, 0, 0])))
    for smiles, (atoms, bonds) in MOLECULES.items():
        body = ", ".join("{%d, %d}" % kv for kv in counts(identifiers(atoms, bonds)))
        print('    {"%s", {%s}},' % (smiles, body))
