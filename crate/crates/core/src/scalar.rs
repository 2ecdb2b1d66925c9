use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Scalar abstraction used by the simulator core.
///
/// State evolution, detector statistics and key-rate metrics are generic over
/// this trait; the crate root exposes `f64` aliases which every downstream
/// crate uses. `f32` compiles and is handy for quick experiments, but the
/// regression tolerances in this workspace assume `f64`.
pub trait Real: RealField + FromPrimitive + ToPrimitive + Copy + Default {
    /// Convert an `f64` literal into `Self`.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal")
    }

    /// Lossy conversion to `f64` for reporting and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite value")
    }
}

impl<T> Real for T where T: RealField + FromPrimitive + ToPrimitive + Copy + Default {}
