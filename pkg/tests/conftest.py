import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from coopnet import GoodsFlow, GoodVector, build_shipping_demo


@pytest.fixture
def demo():
    return build_shipping_demo(10, 12, 3, 5, 6, 8)


@pytest.fixture
def improved_flow():
    """Both cargo owners shipping through the cheaper shipper s1."""
    return GoodsFlow(
        internal={
            ("s1", "c1"): GoodVector({"svc1": 1}),
            ("s1", "c2"): GoodVector({"svc1": 1}),
        },
        external_sales={
            "c1": GoodVector({"deliv1": 1}),
            "c2": GoodVector({"deliv2": 1}),
        },
    )
