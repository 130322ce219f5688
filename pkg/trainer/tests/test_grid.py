"""Grid expansion and the search driver."""
import pytest

from xwalk_trainer import TrainConfig, ValidationError, expand_grid, hparam_grid, write_grid_csv
from xwalk_trainer.grid import GridRow, _rank_key


def test_full_grid_cardinality():
    assert len(expand_grid()) == 64  # 4 learning rates x 4 batches x 4 epochs


def test_expand_grid_order_stable():
    combos = expand_grid([0.1, 0.2], [8], [1, 2])
    assert combos == [(0.1, 8, 1), (0.1, 8, 2), (0.2, 8, 1), (0.2, 8, 2)]


def test_empty_axis_rejected():
    with pytest.raises(ValidationError):
        expand_grid([], [8], [1])


def test_tie_break_prefers_gentler_recipe():
    rows = [
        GridRow(0.001, 16, 4, 0.9),
        GridRow(0.0005, 32, 4, 0.9),
        GridRow(0.0005, 16, 4, 0.9),
        GridRow(0.0005, 16, 2, 0.9),
    ]
    best = min(rows, key=_rank_key)
    assert (best.learning_rate, best.batch_size, best.epochs) == (0.0005, 16, 2)


def test_search_on_toy_dataset(toy_dataset, tmp_path):
    base = TrainConfig(test_size=3, seed=0, batch_size=4)
    rows = hparam_grid(toy_dataset, base,
                       learning_rates=[0.001],
                       batch_sizes=[4],
                       epoch_counts=[2, 8])
    assert len(rows) == 2
    assert sum(row.best for row in rows) == 1
    out = tmp_path / "grid.csv"
    write_grid_csv(rows, out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "learning_rate,batch_size,epochs,test_accuracy,best"
    assert len(lines) == 3


def test_single_point_grid_flagged_best(toy_dataset):
    base = TrainConfig(test_size=3, seed=0, batch_size=4)
    rows = hparam_grid(toy_dataset, base,
                       learning_rates=[0.0005], batch_sizes=[4], epoch_counts=[2])
    assert len(rows) == 1 and rows[0].best


def test_grid_requires_holdout(toy_dataset):
    with pytest.raises(ValidationError, match="test_size"):
        hparam_grid(toy_dataset, TrainConfig(test_size=0))
