import doctest

import pytest

from mdlphrase import miner, preprocess, sequitur


@pytest.mark.parametrize("module", [miner, preprocess, sequitur], ids=lambda m: m.__name__)
def test_docstring_examples(module):
    failed, _ = doctest.testmod(module)
    assert failed == 0
