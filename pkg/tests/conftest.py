import pytest

from coindex._kernels import backend_name, warm_up
from coindex.congruence import cayley_coset_table, reduce_group
from coindex.eiszeta import builtin_dataset
from coindex.ffq import make_reduction
from coindex.reidemeister import subgroup_presentation


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # jit compilation happens here so timed assertions measure the
    # algorithms, not compiler startup
    if backend_name() == "numba":
        warm_up()


@pytest.fixture(scope="session")
def dataset():
    return builtin_dataset()


@pytest.fixture(scope="session")
def reduced_presentation(dataset):
    return dataset.reduced_presentation()


@pytest.fixture(scope="session")
def mod7(dataset, reduced_presentation):
    """Everything the kernel stage needs: field, groups, Cayley table."""
    f = make_reduction(7)
    gamma = reduce_group({k: dataset.gamma_gens[k]
                          for k in reduced_presentation.gen_names}, f)
    s = reduce_group(dataset.s_gens, f)
    table = cayley_coset_table(gamma, cap=10_000)
    return {"field": f, "gamma": gamma, "s": s, "table": table}


@pytest.fixture(scope="session")
def kernel_presentation(reduced_presentation, mod7):
    return subgroup_presentation(reduced_presentation, mod7["table"])
