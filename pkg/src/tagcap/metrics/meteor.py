"""METEOR: staged unigram alignment with a fragmentation penalty.

Stages run in order (exact, then optionally stemmed, then optionally
synonym-based). Within each stage the alignment has maximum match count,
and among those the one minimizing the total chunk count is chosen.

Score per pair: m matches, P = m/|cand|, R = m/|ref|,
Fmean = 10PR / (R + 9P), Penalty = 0.5 * (chunks/m)^3,
score = Fmean * (1 - Penalty); 0 when m = 0.
Corpus score is the mean of pair scores.
"""

from collections.abc import Callable, Sequence

from ..errors import TagcapError

TokenSeq = Sequence[str]
Matcher = Callable[[str, str], bool]

# Search budget for the chunk-minimizing assignment. Captions are short and
# branching only happens on repeated words, so the cap is rarely hit; when it
# is, the best alignment found so far is kept (still a maximum matching).
_NODE_BUDGET = 200_000


class LexiconLoadError(TagcapError):
    pass


def light_stem(word: str) -> str:
    """Small rule-based English suffix stripper for the stemming stage."""
    w = word
    if len(w) > 4 and w.endswith("ies"):
        return w[:-3] + "y"
    if len(w) > 4 and w.endswith("sses"):
        return w[:-2]
    if len(w) > 3 and w.endswith("ing"):
        return w[:-3]
    if len(w) > 3 and w.endswith("ed"):
        return w[:-2]
    if len(w) > 2 and w.endswith("s") and not w.endswith(("ss", "us")):
        return w[:-1]
    return w


def load_synonym_lexicon(path: str) -> dict[str, set[int]]:
    """Plain-text lexicon: one whitespace-separated synonym set per line.
    Returns word -> set of line ids (words sharing a line are synonyms)."""
    lex: dict[str, set[int]] = {}
    try:
        with open(path, encoding="utf-8") as f:
            for line_no, line in enumerate(f):
                for word in line.split():
                    lex.setdefault(word.lower(), set()).add(line_no)
    except OSError as exc:
        raise LexiconLoadError(f"cannot read synonym lexicon {path}: {exc}") from exc
    return lex


def exact_matcher(c: str, r: str) -> bool:
    return c == r


def stem_matcher(c: str, r: str) -> bool:
    return light_stem(c) == light_stem(r)


def make_synonym_matcher(lexicon: dict[str, set[int]]) -> Matcher:
    def match(c: str, r: str) -> bool:
        return c == r or bool(lexicon.get(c, set()) & lexicon.get(r, set()))

    return match


def default_stages(use_stem: bool = False, synonym_lexicon_path: str | None = None) -> list[Matcher]:
    stages: list[Matcher] = [exact_matcher]
    if use_stem:
        stages.append(stem_matcher)
    if synonym_lexicon_path is not None:
        stages.append(make_synonym_matcher(load_synonym_lexicon(synonym_lexicon_path)))
    return stages


def chunk_count(pairs: list[tuple[int, int]]) -> int:
    """Number of maximal runs contiguous in both candidate and reference."""
    if not pairs:
        return 0
    ps = sorted(pairs)
    chunks = 1
    for (c0, r0), (c1, r1) in zip(ps, ps[1:]):
        if c1 != c0 + 1 or r1 != r0 + 1:
            chunks += 1
    return chunks


def _max_matching_size(allowed: dict[int, list[int]]) -> int:
    """Kuhn's augmenting-path maximum bipartite matching size."""
    match_r: dict[int, int] = {}

    def try_augment(ci: int, seen: set[int]) -> bool:
        for ri in allowed[ci]:
            if ri in seen:
                continue
            seen.add(ri)
            if ri not in match_r or try_augment(match_r[ri], seen):
                match_r[ri] = ci
                return True
        return False

    size = 0
    for ci in sorted(allowed):
        if try_augment(ci, set()):
            size += 1
    return size


def _greedy_matching(allowed: dict[int, list[int]], target: int) -> list[tuple[int, int]]:
    """Left-to-right first-available assignment; used to seed the search."""
    used_r: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for ci in sorted(allowed):
        if len(pairs) == target:
            break
        for ri in allowed[ci]:
            if ri not in used_r:
                used_r.add(ri)
                pairs.append((ci, ri))
                break
    return pairs


def _min_chunk_matching(
    allowed: dict[int, list[int]],
    target: int,
    fixed_pairs: list[tuple[int, int]],
) -> list[tuple[int, int]]:
    """Among matchings of size `target`, pick one minimizing the chunk count
    of fixed_pairs plus the new pairs. Exhaustive with pruning."""
    if target == 0:
        return []
    cand_idx = sorted(allowed)
    n = len(cand_idx)

    seed = _greedy_matching(allowed, target)
    best_pairs = seed
    best_chunks = chunk_count(fixed_pairs + seed) if len(seed) == target else None
    nodes = 0

    def rec(i: int, used_r: frozenset[int], chosen: list[tuple[int, int]]) -> None:
        nonlocal best_pairs, best_chunks, nodes
        if best_chunks == 1:
            return
        nodes += 1
        if nodes > _NODE_BUDGET:
            return
        if len(chosen) == target:
            ch = chunk_count(fixed_pairs + chosen)
            if best_chunks is None or ch < best_chunks:
                best_chunks = ch
                best_pairs = list(chosen)
            return
        if i == n or len(chosen) + (n - i) < target:
            return
        ci = cand_idx[i]
        for ri in allowed[ci]:
            if ri in used_r:
                continue
            chosen.append((ci, ri))
            rec(i + 1, used_r | {ri}, chosen)
            chosen.pop()
        rec(i + 1, used_r, chosen)

    rec(0, frozenset(), [])
    return best_pairs


def align(cand: TokenSeq, ref: TokenSeq, stages: Sequence[Matcher]) -> list[tuple[int, int]]:
    """Stage-wise alignment; returns matched (cand_pos, ref_pos) pairs."""
    pairs: list[tuple[int, int]] = []
    used_c: set[int] = set()
    used_r: set[int] = set()
    for stage in stages:
        allowed = {}
        for ci, cw in enumerate(cand):
            if ci in used_c:
                continue
            refs = [ri for ri, rw in enumerate(ref) if ri not in used_r and stage(cw, rw)]
            if refs:
                allowed[ci] = refs
        if not allowed:
            continue
        target = _max_matching_size(allowed)
        new_pairs = _min_chunk_matching(allowed, target, pairs)
        pairs.extend(new_pairs)
        used_c.update(ci for ci, _ in new_pairs)
        used_r.update(ri for _, ri in new_pairs)
    return sorted(pairs)


def meteor_pair(cand: TokenSeq, ref: TokenSeq, stages: Sequence[Matcher] | None = None) -> float:
    if stages is None:
        stages = [exact_matcher]
    if not cand or not ref:
        return 0.0
    pairs = align(cand, ref, stages)
    m = len(pairs)
    if m == 0:
        return 0.0
    p = m / len(cand)
    r = m / len(ref)
    fmean = 10.0 * p * r / (r + 9.0 * p)
    penalty = 0.5 * (chunk_count(pairs) / m) ** 3
    return fmean * (1.0 - penalty)


def meteor_corpus(
    cands: Sequence[TokenSeq], refs: Sequence[TokenSeq], stages: Sequence[Matcher] | None = None
) -> float:
    if len(cands) != len(refs):
        raise TagcapError(f"{len(cands)} candidates vs {len(refs)} references")
    if not cands:
        return 0.0
    return sum(meteor_pair(c, r, stages) for c, r in zip(cands, refs)) / len(cands)
