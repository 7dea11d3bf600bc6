use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One convolution layer as the 7-deep loop nest over
/// (N, K, P, Q) outputs and (C, R, S) reductions. Unpadded; one byte per element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LayerShape {
    pub name: String,
    /// Batch.
    pub n: u64,
    /// Input channels.
    pub c: u64,
    /// Ifmap height.
    pub h: u64,
    /// Ifmap width.
    pub w: u64,
    /// Output channels (filters).
    pub k: u64,
    /// Filter height.
    pub r: u64,
    /// Filter width.
    pub s: u64,
    pub stride: u64,
}

impl LayerShape {
    /// Batch-1 convolution.
    #[allow(clippy::too_many_arguments)]
    pub fn conv(name: &str, h: u64, w: u64, r: u64, s: u64, c: u64, k: u64, stride: u64) -> Result<Self> {
        let shape = LayerShape {
            name: name.to_string(),
            n: 1,
            c,
            h,
            w,
            k,
            r,
            s,
            stride,
        };
        shape.validate()?;
        Ok(shape)
    }

    pub fn validate(&self) -> Result<()> {
        let extents = [
            ("n", self.n),
            ("c", self.c),
            ("h", self.h),
            ("w", self.w),
            ("k", self.k),
            ("r", self.r),
            ("s", self.s),
            ("stride", self.stride),
        ];
        if let Some((dim, _)) = extents.iter().find(|(_, v)| *v == 0) {
            return Err(Error::invalid(format!("layer `{}`: {dim} must be >= 1", self.name)));
        }
        if self.r > self.h || self.s > self.w {
            return Err(Error::invalid(format!(
                "layer `{}`: filter {}x{} larger than ifmap {}x{}",
                self.name, self.r, self.s, self.h, self.w
            )));
        }
        Ok(())
    }

    /// Ofmap height.
    pub fn p(&self) -> u64 {
        (self.h - self.r) / self.stride + 1
    }

    /// Ofmap width.
    pub fn q(&self) -> u64 {
        (self.w - self.s) / self.stride + 1
    }

    /// Drops ifmap rows/columns no window ever reads.
    pub fn normalized(&self) -> LayerShape {
        LayerShape {
            h: (self.p() - 1) * self.stride + self.r,
            w: (self.q() - 1) * self.stride + self.s,
            ..self.clone()
        }
    }

    pub fn ifmap_bytes(&self) -> u64 {
        self.n * self.c * self.h * self.w
    }

    pub fn weight_bytes(&self) -> u64 {
        self.k * self.c * self.r * self.s
    }

    pub fn ofmap_bytes(&self) -> u64 {
        self.n * self.k * self.p() * self.q()
    }

    /// Multiply-accumulates in the loop nest.
    pub fn macs(&self) -> u64 {
        self.n * self.k * self.p() * self.q() * self.c * self.r * self.s
    }
}
