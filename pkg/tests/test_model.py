import pytest
from hypothesis import given
from hypothesis import strategies as st

from allocdss.model import (
    Category,
    Instance,
    Order,
    PlanConfig,
    Store,
    Warehouse,
    effective_plan,
    residual_capacities,
    validate_instance,
    validate_plan,
)

from helpers import mini_instance


def valid_instance():
    return mini_instance(
        orders=[
            ("o1", "s1", "w1", "c1", 2.0, 1.0),
            ("o2", "s2", "w2", "c2", 3.5, 2.0),
        ],
        stores={"s1": ("r1", 10.0, 1.0), "s2": ("r1", 8.0, 0.0)},
        categories={"c1": None, "c2": 6.0},
        warehouses={"w1": 1, "w2": 2},
    )


class TestValidateInstance:
    def test_valid_instance_has_no_violations(self):
        assert validate_instance(valid_instance()) == []

    def test_mismatched_collection_key(self):
        inst = valid_instance()
        broken = Instance(
            orders=inst.orders,
            stores={"WRONG": inst.stores["s1"], "s2": inst.stores["s2"]},
            routes=inst.routes,
            categories=inst.categories,
            warehouses=inst.warehouses,
        )
        assert any("keyed as" in v for v in validate_instance(broken))

    def test_no_warehouses(self):
        inst = valid_instance()
        broken = Instance(
            orders=(),
            stores=inst.stores,
            routes=inst.routes,
            categories=inst.categories,
            warehouses={},
        )
        assert any("at least one warehouse" in v for v in validate_instance(broken))

    def test_constrained_category_missing_limit(self):
        inst = mini_instance(
            orders=[],
            stores={"s1": ("r1", 5.0, 0.0)},
            categories={"c1": None},
        )
        broken_cats = {"c1": Category(id="c1", constrained=True, route_limit=None)}
        broken = Instance(
            orders=(),
            stores=inst.stores,
            routes=inst.routes,
            categories=broken_cats,
            warehouses=inst.warehouses,
        )
        assert any("route_limit missing" in v for v in validate_instance(broken))

    def test_negative_route_limit(self):
        broken = mini_instance(
            orders=[], stores={"s1": ("r1", 5.0, 0.0)}, categories={"c1": -2.0}
        )
        assert any("route_limit -2.0 < 0" in v for v in validate_instance(broken))

    def test_store_problems(self):
        inst = valid_instance()
        bad_store = Store(
            id="s1",
            route_id="nowhere",
            base_capacity=-1.0,
            flow_through_deduction=-0.5,
            eligibility={"c1": 2, "c2": 1},
        )
        broken = Instance(
            orders=(),
            stores={"s1": bad_store},
            routes=inst.routes,
            categories=inst.categories,
            warehouses=inst.warehouses,
        )
        violations = validate_instance(broken)
        assert any("unknown route" in v for v in violations)
        assert any("base_capacity" in v for v in violations)
        assert any("flow_through_deduction" in v for v in violations)
        assert any("must be 0 or 1" in v for v in violations)

    def test_warehouse_rank_below_one(self):
        inst = valid_instance()
        broken = Instance(
            orders=(),
            stores=inst.stores,
            routes=inst.routes,
            categories=inst.categories,
            warehouses={"w1": Warehouse(id="w1", rank=0)},
        )
        assert any("rank 0 < 1" in v for v in validate_instance(broken))

    def test_duplicate_ranks_flagged_only_for_active(self):
        inst = valid_instance()
        dup = Instance(
            orders=(),
            stores=inst.stores,
            routes=inst.routes,
            categories=inst.categories,
            warehouses={
                "w1": Warehouse(id="w1", active=True, rank=1),
                "w2": Warehouse(id="w2", active=True, rank=1),
            },
        )
        assert any("duplicate rank 1" in v for v in validate_instance(dup))

        ok = Instance(
            orders=(),
            stores=inst.stores,
            routes=inst.routes,
            categories=inst.categories,
            warehouses={
                "w1": Warehouse(id="w1", active=True, rank=1),
                "w2": Warehouse(id="w2", active=False, rank=1),
            },
        )
        assert validate_instance(ok) == []

    def test_order_problems(self):
        inst = valid_instance()
        orders = (
            Order("o1", "s1", "w1", "c1", 2.0, 1.0),
            Order("o1", "ghost-store", "ghost-wh", "ghost-cat", -1.0, -2.0),
        )
        broken = Instance(
            orders=orders,
            stores=inst.stores,
            routes=inst.routes,
            categories=inst.categories,
            warehouses=inst.warehouses,
        )
        violations = validate_instance(broken)
        assert any("duplicate order id" in v for v in violations)
        assert any("volume -1.0 must be > 0" in v for v in violations)
        assert any("priority -2.0 < 0" in v for v in violations)
        assert any("unknown store 'ghost-store'" in v for v in violations)
        assert any("unknown warehouse 'ghost-wh'" in v for v in violations)
        assert any("unknown category 'ghost-cat'" in v for v in violations)

    def test_zero_volume_rejected(self):
        broken = mini_instance(
            orders=[("o1", "s1", "w1", "c1", 0.0, 1.0)],
            stores={"s1": ("r1", 5.0, 0.0)},
        )
        assert any("volume 0.0 must be > 0" in v for v in validate_instance(broken))


class TestValidatePlan:
    def test_valid_plan(self):
        inst = valid_instance()
        plan = PlanConfig(activations={"w1": True, "w2": True}, ranks={"w1": 1, "w2": 2})
        assert validate_plan(plan, inst) == []

    def test_unknown_warehouse_has_field_path(self):
        plan = PlanConfig(activations={"ghost": True}, ranks={"ghost": 1})
        violations = validate_plan(plan, valid_instance())
        assert any(v.startswith("plan.activations.ghost:") for v in violations)
        assert any(v.startswith("plan.ranks.ghost:") for v in violations)

    def test_zero_active_warehouses(self):
        plan = PlanConfig(activations={"w1": False, "w2": False}, ranks={})
        violations = validate_plan(plan, valid_instance())
        assert any("at least one warehouse" in v for v in violations)

    def test_active_warehouse_without_rank(self):
        plan = PlanConfig(activations={"w1": True}, ranks={})
        violations = validate_plan(plan, valid_instance())
        assert any(v.startswith("plan.ranks.w1:") and "no rank" in v for v in violations)

    def test_rank_below_one(self):
        plan = PlanConfig(activations={"w1": True}, ranks={"w1": 0})
        assert any("rank 0 < 1" in v for v in validate_plan(plan, valid_instance()))

    def test_duplicate_ranks(self):
        plan = PlanConfig(
            activations={"w1": True, "w2": True}, ranks={"w1": 3, "w2": 3}
        )
        violations = validate_plan(plan, valid_instance())
        assert any("duplicate rank 3" in v for v in violations)

    def test_inactive_warehouse_needs_no_rank(self):
        plan = PlanConfig(activations={"w1": True, "w2": False}, ranks={"w1": 1})
        assert validate_plan(plan, valid_instance()) == []


class TestResidualCapacities:
    def test_base_minus_flow(self):
        residuals = residual_capacities(valid_instance())
        assert residuals == {"s1": 9.0, "s2": 8.0}

    def test_prior_load_deducted(self):
        residuals = residual_capacities(valid_instance(), {"s1": 4.0})
        assert residuals == {"s1": 5.0, "s2": 8.0}

    def test_clamped_at_zero(self):
        residuals = residual_capacities(valid_instance(), {"s1": 100.0})
        assert residuals["s1"] == 0.0

    def test_unknown_store_rejected(self):
        with pytest.raises(ValueError, match="unknown stores.*ghost"):
            residual_capacities(valid_instance(), {"ghost": 1.0})

    @given(
        base=st.floats(0, 1e6),
        flow=st.floats(0, 1e6),
        prior=st.floats(0, 1e6),
    )
    def test_never_negative(self, base, flow, prior):
        inst = mini_instance(orders=[], stores={"s1": ("r1", base, flow)})
        assert residual_capacities(inst, {"s1": prior})["s1"] >= 0.0


class TestEffectivePlan:
    def test_defaults_from_instance(self):
        inst = mini_instance(
            orders=[],
            stores={"s1": ("r1", 5.0, 0.0)},
            warehouses={"w1": 2, "w2": 5},
            inactive=["w2"],
        )
        active, ranks = effective_plan(inst, None)
        assert active == {"w1": True, "w2": False}
        assert ranks == {"w1": 2, "w2": 5}

    def test_plan_missing_warehouse_is_inactive(self):
        inst = valid_instance()
        plan = PlanConfig(activations={"w1": True}, ranks={"w1": 1})
        active, ranks = effective_plan(inst, plan)
        assert active == {"w1": True, "w2": False}
        # the unranked inactive warehouse keeps its instance rank
        assert ranks == {"w1": 1, "w2": 2}

    def test_plan_overrides_ranks(self):
        inst = valid_instance()
        plan = PlanConfig(
            activations={"w1": True, "w2": True}, ranks={"w1": 2, "w2": 1}
        )
        _, ranks = effective_plan(inst, plan)
        assert ranks == {"w1": 2, "w2": 1}


class TestPlanConfig:
    def test_from_instance_skips_inactive_ranks(self):
        inst = mini_instance(
            orders=[],
            stores={"s1": ("r1", 5.0, 0.0)},
            warehouses={"w1": 1, "w2": 2},
            inactive=["w2"],
        )
        plan = PlanConfig.from_instance(inst)
        assert plan.activations == {"w1": True, "w2": False}
        assert plan.ranks == {"w1": 1}

    def test_active_warehouses_sorted(self):
        plan = PlanConfig(
            activations={"w3": True, "w1": True, "w2": False}, ranks={"w1": 1, "w3": 2}
        )
        assert plan.active_warehouses() == ["w1", "w3"]
