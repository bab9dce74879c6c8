//! A three-point example small enough to trace by hand: `Y = {x0, x1, y}`,
//! `X = {x0, x1}`, with `y` close to `x0`.

use crate::error::Result;
use crate::nerve::AmbientSpace;
use crate::operator::{extend, ExtendedTable, ExtensionConfig};
use crate::table::{FunctionTable, GroundSpace};

pub struct Demo {
    pub space: AmbientSpace,
    pub p: FunctionTable,
    pub config: ExtensionConfig,
}

pub fn demo_metric() -> FunctionTable {
    let ground = GroundSpace::new(["x0", "x1", "y"]).expect("distinct labels");
    FunctionTable::from_rows(
        ground,
        &[
            vec![0.0, 1.0, 0.2],
            vec![1.0, 0.0, 0.9],
            vec![0.2, 0.9, 0.0],
        ],
    )
    .expect("valid rows")
}

pub fn demo_pseudometric() -> FunctionTable {
    let ground = GroundSpace::new(["x0", "x1"]).expect("distinct labels");
    FunctionTable::from_rows(ground, &[vec![0.0, 1.0], vec![1.0, 0.0]]).expect("valid rows")
}

pub fn demo() -> Demo {
    let space = AmbientSpace::new(demo_metric(), vec![0, 1], 1e-12).expect("demo metric is valid");
    let config = ExtensionConfig::default()
        .with_truncation(2)
        .with_base_points(0, 1);
    Demo {
        space,
        p: demo_pseudometric(),
        config,
    }
}

pub fn run_demo() -> Result<ExtendedTable> {
    let Demo { space, p, config } = demo();
    extend(&p, &space, &config)
}
