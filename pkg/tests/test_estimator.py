import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from lpaclass.errors import GraphFormatError
from lpaclass.estimator import PointedK0Classifier, check_graphs
from lpaclass.multigraph import builtin

from conftest import E1_6, E1_7


def test_fit_labels(three_vertex):
    est = PointedK0Classifier().fit(three_vertex)
    assert est.n_classes_ == 7
    assert len(est.labels_) == 34
    assert sorted(est.table_.sizes) == [1, 1, 2, 2, 4, 6, 18]
    k = three_vertex.index(next(g for g in three_vertex if g.matrix == E1_6.matrix))
    assert est.predict([E1_6]) == [est.labels_[k]]


def test_predict_unseen_class(three_vertex):
    est = PointedK0Classifier().fit(three_vertex)
    assert est.predict([builtin("R_n", n=6)]) == [-1]
    assert est.predict([E1_7.permute([2, 0, 1])])[0] >= 0


def test_dedupe_and_params():
    g = builtin("S2")
    est = PointedK0Classifier(dedupe=True).fit([g, g.permute([1, 0]), builtin("R2_hat")])
    assert est.table_.sizes == [2]
    assert est.labels_ == [0, 0, 0]
    assert est.get_params() == {"dedupe": True}
    assert clone(est).get_params() == {"dedupe": True}
    assert PointedK0Classifier().fit_predict([g, builtin("R_n", n=3)]) == [0, 1]


def test_input_validation():
    with pytest.raises(GraphFormatError):
        check_graphs(builtin("S2"))
    with pytest.raises(GraphFormatError, match="sample 1"):
        check_graphs([builtin("S2"), {"vertices": ["a"]}])
    gs = check_graphs(['{"vertices":["v"],"edges":[["v","v",2]]}'])
    assert gs[0].matrix == ((2,),)
    with pytest.raises(NotFittedError):
        PointedK0Classifier().predict([builtin("S2")])
