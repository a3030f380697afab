import itertools

import pytest

from dictcode.binary_channel import NoiseProfile
from dictcode.core import (Code, Dictionary, DimensionError, DomainError,
                           FullSpace, ReceivedWord, ResourceError, Word,
                           ball_volume, hamming_distance, min_distance)
from dictcode.gv_code import (Decoded, DecodingError, FailureReason,
                              TwoStageDecoder, greedy_gv_construct,
                              gv_guarantee, stirling_size_bound,
                              theorem1_pipeline, two_stage_decode)

from unit_helpers import random_dictionary


def w(text):
    return Word.parse(text)


def test_full_space_d1_takes_everything():
    report = greedy_gv_construct(Dictionary.full_space(3), 1)
    assert report.achieved_size == 8
    assert report.guarantee == 8
    assert list(report.code) == list(Dictionary.full_space(3))


def test_full_space_d3():
    report = greedy_gv_construct(Dictionary.full_space(3), 3)
    assert [str(x) for x in report.code] == ["000", "111"]
    assert report.guarantee == 2


def test_scan_follows_dictionary_order():
    dictionary = Dictionary(4, (w("0110"), w("0000"), w("1111"), w("1001")))
    report = greedy_gv_construct(dictionary, 2)
    assert [str(x) for x in report.code] == ["0110", "0000", "1111", "1001"]
    report = greedy_gv_construct(dictionary, 4)
    assert [str(x) for x in report.code] == ["0110", "1001"]


@pytest.mark.parametrize("d", (0, 5))
def test_distance_out_of_range(d):
    with pytest.raises(DomainError):
        greedy_gv_construct(Dictionary.full_space(4), d)


def test_empty_dictionary():
    with pytest.raises(DomainError):
        greedy_gv_construct(Dictionary(4, ()), 2)


def test_virtual_dictionary_is_rejected():
    with pytest.raises(ResourceError):
        greedy_gv_construct(FullSpace(4), 2)


def sequential_scan(dictionary, d):
    chosen = []
    for x in dictionary:
        if all(hamming_distance(x, c) >= d for c in chosen):
            chosen.append(x)
    return chosen


@pytest.mark.parametrize("seed", range(5))
def test_matches_sequential_scan(seed):
    dictionary = random_dictionary(10, 300, seed)
    for d in (2, 3, 4):
        report = greedy_gv_construct(dictionary, d)
        assert list(report.code) == sequential_scan(dictionary, d)


def test_gv_guarantee_on_random_dictionaries():
    for seed in range(50):
        dictionary = random_dictionary(12, 1024, seed)
        for d in (1, 3, 5):
            report = greedy_gv_construct(dictionary, d)
            assert report.achieved_size >= -(-1024 // ball_volume(12, d - 1))
            assert report.achieved_size >= report.guarantee
            if d > 1:
                assert min_distance(report.code) >= d


def test_construction_is_maximal():
    dictionary = random_dictionary(10, 400, 17)
    report = greedy_gv_construct(dictionary, 4)
    for x in dictionary:
        assert min(hamming_distance(x, c) for c in report.code) <= 3


def test_gv_guarantee_values():
    # V(12, 2) = 1 + 12 + 66 = 79
    assert gv_guarantee(1024, 12, 3) == 13
    assert gv_guarantee(16, 7, 3) == 1
    assert gv_guarantee(128, 7, 2) == 16


def test_stirling_size_bound():
    assert stirling_size_bound(100, 11, 1.0) > 0
    with pytest.raises(DomainError):
        stirling_size_bound(10, 7, 1.0)


def hamming7():
    generators = ("1101000", "0110100", "0011010", "0001101")
    words = set()
    for bits in itertools.product((0, 1), repeat=4):
        word = [0] * 7
        for b, g in zip(bits, generators):
            if b:
                word = [x ^ int(y) for x, y in zip(word, g)]
        words.add(tuple(word))
    return Code(tuple(Word(x) for x in sorted(words)))


def test_decoder_corrects_one_substitution():
    code = hamming7()
    for x in code:
        for i in range(7):
            entries = list(x.symbols)
            entries[i] ^= 1
            outcome = two_stage_decode(code, 3, ReceivedWord(entries))
            assert outcome == Decoded(x)
            assert outcome.ok


def test_decoder_corrects_two_erasures():
    code = hamming7()
    for x in code:
        for i, j in itertools.combinations(range(7), 2):
            entries = list(x.symbols)
            entries[i] = entries[j] = None
            assert two_stage_decode(code, 3, ReceivedWord(entries)).word == x


def test_distance_tie():
    code = Code((w("000"), w("111")))
    outcome = two_stage_decode(code, 3, ReceivedWord.parse("0e1"))
    assert outcome == DecodingError(FailureReason.DISTANCE_TIE)
    assert not outcome.ok


def test_ambiguous_completion():
    code = Code((w("0000"), w("0011")))
    outcome = two_stage_decode(code, 2, ReceivedWord.parse("00ee"))
    assert outcome == DecodingError(FailureReason.AMBIGUOUS_COMPLETION)


def test_all_erased():
    received = ReceivedWord.parse("eee")
    code = Code((w("000"), w("111")))
    assert two_stage_decode(code, 3, received).reason \
        is FailureReason.DISTANCE_TIE
    single = Code((w("010"),))
    assert two_stage_decode(single, 1, received) == Decoded(w("010"))


def test_decoder_length_mismatch():
    decoder = TwoStageDecoder(Code((w("000"), w("111"))), 3)
    with pytest.raises(DimensionError):
        decoder.decode(ReceivedWord.parse("0000"))


@pytest.mark.slow
def test_decoder_guarantee_exhaustive():
    dictionary = random_dictionary(9, 300, 99)
    code = greedy_gv_construct(dictionary, 5).code
    decoder = TwoStageDecoder(code, 5)
    positions = range(9)
    patterns = []
    for f in range(3):
        for substituted in itertools.combinations(positions, f):
            rest = [i for i in positions if i not in substituted]
            for e in range(5 - 2 * f):
                for erased in itertools.combinations(rest, e):
                    patterns.append((substituted, erased))
    failures = 0
    for x in code:
        for substituted, erased in patterns:
            entries = list(x.symbols)
            for i in substituted:
                entries[i] ^= 1
            for i in erased:
                entries[i] = None
            outcome = decoder.decode(ReceivedWord(entries))
            if not outcome.ok or outcome.word != x:
                failures += 1
    assert failures == 0


def test_theorem1_noiseless():
    dictionary = Dictionary(4, (w("0000"), w("0110"), w("1011"), w("1100")))
    report = theorem1_pipeline(dictionary, NoiseProfile.uniform(4), 0.1)
    assert report.d == 1
    assert report.feasible
    assert report.achieved_rate == pytest.approx(report.alpha)
    assert report.target_rate == pytest.approx(report.alpha)


def test_theorem1_full_space_statistics_only():
    report = theorem1_pipeline(FullSpace(100),
                               NoiseProfile.uniform(100, 0.05), 0.1)
    assert report.d == 13
    assert report.construction is None
    assert report.alpha == 1.0
    assert report.feasible


def test_theorem1_infeasible():
    report = theorem1_pipeline(FullSpace(3), NoiseProfile.uniform(3, 0.5), 0.1)
    assert report.d == 4
    assert not report.feasible
    assert report.infeasible == ("d = 4 > n = 3",)
    assert any("p_eff" in reason for reason in report.warnings)


def test_theorem1_half_noise_only_warns():
    report = theorem1_pipeline(Dictionary.full_space(10),
                               NoiseProfile.uniform(10, 0.0, 0.5), 0.1)
    assert report.stats.p_eff == 0.5
    assert report.d == 7
    assert report.feasible
    assert report.warnings == ("p_eff = 0.500000 >= 1/2",)
    assert report.target_rate == pytest.approx(0.0)
    assert min_distance(report.construction.code) >= 7


def test_theorem1_length_mismatch():
    with pytest.raises(DimensionError):
        theorem1_pipeline(Dictionary.full_space(3), NoiseProfile.uniform(4),
                          0.1)


def test_theorem1_code_meets_its_distance():
    dictionary = random_dictionary(12, 1024, 4)
    report = theorem1_pipeline(dictionary,
                               NoiseProfile.uniform(12, 0.02, 0.02), 0.2)
    assert report.d == 2
    assert min_distance(report.construction.code) >= report.d
