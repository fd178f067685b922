use thiserror::Error as ThisError;

#[derive(Debug, Clone, PartialEq, ThisError)]
pub enum Error {
    #[error("non-finite {context}: ({x}, {y}, {z})")]
    NonFinite {
        context: &'static str,
        x: f64,
        y: f64,
        z: f64,
    },

    #[error("point outside chart {chart}: need {coord} {requirement}, got {value}")]
    OutsideChart {
        chart: &'static str,
        coord: char,
        requirement: &'static str,
        value: f64,
    },

    #[error("parameters not unimodular: |ad - bc - 1| = {defect:e}")]
    NotUnimodular { defect: f64 },

    #[error("closed-form flow singular at t = {t_critical}")]
    SingularFlow { t_critical: f64 },

    #[error("z{index}(0) = 0: orbit lies in an invariant coordinate plane of the chart")]
    DegeneratePlaneOrbit { index: u8 },

    #[error("no real flow constants: z{index}(0) < 0 while z3(0) != 0")]
    NoRealConstants { index: u8 },

    #[error("level set does not intersect the sampling box")]
    FiberMissesBox,

    #[error("invalid integrator settings: {0}")]
    InvalidSettings(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("vector field produced a non-finite value during a step")]
    StepOverflow,
}
