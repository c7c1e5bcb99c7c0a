import numpy as np
import pytest
import torch

from ispu_trainer import parse_arch
from ispu_trainer.data import Dataset, split
from ispu_trainer.export import fold_norm_rows, pack_sign_row, unpack_row


class TestPacking:
    def test_bit_layout_matches_contract(self):
        # value i sits at bit (i mod 32) of word (i div 32)
        signs = [-1] * 64
        signs[0] = 1    # word 0 bit 0
        signs[33] = 1   # word 1 bit 1
        assert pack_sign_row(signs) == "00000001 00000002"

    def test_all_plus_one(self):
        assert pack_sign_row([1] * 32) == "ffffffff"

    def test_zero_counts_as_plus_one(self):
        assert pack_sign_row([0] * 32) == "ffffffff"

    def test_round_trip(self):
        rng = np.random.default_rng(1)
        signs = rng.choice((-1, 1), 96)
        assert np.array_equal(unpack_row(pack_sign_row(signs)), signs)

    def test_ragged_row_rejected(self):
        with pytest.raises(ValueError):
            pack_sign_row([1] * 48)


class TestFolding:
    def test_worked_example(self):
        bn = torch.nn.BatchNorm1d(1, eps=1e-3)
        with torch.no_grad():
            bn.weight[0] = 2.0
            bn.bias[0] = -1.0
            bn.running_mean[0] = 3.0
            bn.running_var[0] = 1.0 - 1e-3   # sqrt(var + eps) == 1 exactly
        tau, flip = fold_norm_rows(bn)
        assert tau[0] == pytest.approx(3.5)
        assert not flip[0]

    def test_negative_gamma_sets_flip(self):
        bn = torch.nn.BatchNorm1d(1, eps=1e-3)
        with torch.no_grad():
            bn.weight[0] = -1.0
        _, flip = fold_norm_rows(bn)
        assert flip[0]

    def test_zero_gamma_rejected(self):
        bn = torch.nn.BatchNorm1d(1, eps=1e-3)
        with torch.no_grad():
            bn.weight[0] = 0.0
        with pytest.raises(ValueError):
            fold_norm_rows(bn)


class TestArchNames:
    @pytest.mark.parametrize(
        "name,kind,hidden",
        [
            ("Float", "float", ()),
            ("Float_1,32", "float", (32,)),
            ("Binary_2,64", "binary", (64, 64)),
            ("binary_4,256", "binary", (256,) * 4),
        ],
    )
    def test_parse(self, name, kind, hidden):
        assert parse_arch(name) == (kind, hidden)

    def test_rejects_bad_names(self):
        for bad in ("Quantized_1,8", "Float_x", "Binary_1,48"):
            with pytest.raises(ValueError):
                parse_arch(bad)


class TestSplit:
    def _dataset(self, n=100):
        rng = np.random.default_rng(2)
        return Dataset(rng.normal(size=(n, 30)), rng.integers(0, 5, n),
                       tuple(f"f{i:02d}" for i in range(30)))

    def test_ratios_and_determinism(self):
        ds = self._dataset()
        a = split(ds, (0.7, 0.15, 0.15), seed=3)
        b = split(ds, (0.7, 0.15, 0.15), seed=3)
        assert [len(p.labels) for p in a] == [70, 15, 15]
        for pa, pb in zip(a, b):
            assert np.array_equal(pa.features, pb.features)

    def test_ratios_must_sum_to_one(self):
        with pytest.raises(ValueError):
            split(self._dataset(), (0.5, 0.2, 0.2), seed=0)
