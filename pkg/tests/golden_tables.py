"""Hand-checked expected values shared between unit and acceptance tests."""

# catalog name -> (k0 series names, k1 series names, kr series names)
GOLDEN_PARTITIONS = {
    "circle_T": ((), ("cyclic",), ()),
    "o2_toral": ((), ("cyclic",), ()),
    "o2_full": (("dihedral",), (), ()),
    "pin2_toral": ((), ("cyclic",), ()),
    "pin2_full": (("quaternion",), (), ()),
    "t_times_c2_full": ((), ("product_cyclic", "twisted_cyclic"), ()),
    "t2_semifree": ((), ("unit",), ()),
    "t_times_o2": (("dihedral_product",), ("toral_product",), ()),
    "su3_normalizer_full": (("full_image",), (), ()),
    "t2_c3_full": (("full_image",), (), ()),
    "u2_torus_normalizer_dim_ge_1": (("central",), ("antidiagonal",), ()),
}

# catalog name -> sheaf type token
GOLDEN_SHEAF_TYPES = {
    "circle_T": "type1",
    "o2_toral": "type1",
    "o2_full": "type0",
    "pin2_toral": "type1",
    "pin2_full": "type0",
    "t_times_c2_full": "type1",
    "t2_semifree": "type1",
    "t_times_o2": "mixed",
    "su3_normalizer_full": "type0",
    "t2_c3_full": "type0",
    "u2_torus_normalizer_dim_ge_1": "mixed",
}
