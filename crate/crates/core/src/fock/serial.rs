//! JSON schema for states and operators:
//! `{"register": {"modes": [...], "cutoffs": [...]}, "data": [[re, im], ...]}`
//! with `data` in canonical basis order (row-major flattening for
//! matrices). Round-trips are bit-exact.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::operator::FockOperator;
use super::register::ModeRegister;
use super::state::PureState;
use crate::error::{Result, SimError};

#[derive(Debug, Serialize, Deserialize)]
struct RegisterSchema {
    modes: Vec<String>,
    cutoffs: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct VectorSchema {
    register: RegisterSchema,
    data: Vec<[f64; 2]>,
    #[serde(default)]
    leakage: f64,
}

fn register_schema(reg: &ModeRegister) -> RegisterSchema {
    RegisterSchema {
        modes: reg.labels().to_vec(),
        cutoffs: reg.cutoffs().to_vec(),
    }
}

fn register_from_schema(schema: RegisterSchema) -> Result<Arc<ModeRegister>> {
    ModeRegister::new(schema.modes, schema.cutoffs)
}

impl PureState {
    pub fn to_json(&self) -> String {
        let schema = VectorSchema {
            register: register_schema(self.register()),
            data: self.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
            leakage: self.leakage(),
        };
        serde_json::to_string(&schema).expect("state serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let schema: VectorSchema = serde_json::from_str(text)?;
        let register = register_from_schema(schema.register)?;
        let amps: Vec<C64> = schema.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        PureState::from_amplitudes(&register, amps, schema.leakage)
    }
}

impl DensityMatrix {
    pub fn to_json(&self) -> String {
        let dim = self.dim();
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let z = self.element(r, c);
                data.push([z.re, z.im]);
            }
        }
        let schema = VectorSchema {
            register: register_schema(self.register()),
            data,
            leakage: self.leakage(),
        };
        serde_json::to_string(&schema).expect("density serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let schema: VectorSchema = serde_json::from_str(text)?;
        let register = register_from_schema(schema.register)?;
        let dim = register.dim();
        if schema.data.len() != dim * dim {
            return Err(SimError::DimensionMismatch {
                expected: dim * dim,
                got: schema.data.len(),
            });
        }
        let mut m = nalgebra::DMatrix::<C64>::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                let [re, im] = schema.data[r * dim + c];
                m[(r, c)] = C64::new(re, im);
            }
        }
        Ok(DensityMatrix::from_parts(&register, m, schema.leakage))
    }
}

impl FockOperator {
    /// Dense row-major serialization; intended for desk-scale registers.
    pub fn to_json(&self) -> String {
        let dim = self.dim();
        let mut data = vec![[0.0f64; 2]; dim * dim];
        for (r, c, v) in self.csr().entries() {
            data[r * dim + c] = [v.re, v.im];
        }
        let schema = VectorSchema {
            register: register_schema(self.register()),
            data,
            leakage: 0.0,
        };
        serde_json::to_string(&schema).expect("operator serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let schema: VectorSchema = serde_json::from_str(text)?;
        let register = register_from_schema(schema.register)?;
        let dim = register.dim();
        if schema.data.len() != dim * dim {
            return Err(SimError::DimensionMismatch {
                expected: dim * dim,
                got: schema.data.len(),
            });
        }
        let mut triplets = Vec::new();
        for (flat, &[re, im]) in schema.data.iter().enumerate() {
            if re != 0.0 || im != 0.0 {
                triplets.push((flat / dim, flat % dim, C64::new(re, im)));
            }
        }
        Ok(FockOperator::from_triplets(&register, triplets))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::operator::annihilation;

    #[test]
    fn state_round_trip_is_bit_exact() {
        let reg = ModeRegister::new(vec!["s", "b"], vec![2, 3]).unwrap();
        let mut psi = PureState::vacuum(&reg);
        let mut seed = 0x9e3779b97f4a7c15u64;
        for z in psi.amplitudes_mut().iter_mut() {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let re = ((seed >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let im = ((seed >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
            *z = C64::new(re * 1e-3, im * 297.25);
        }
        let psi = psi.with_leakage(3.5e-13);
        let back = PureState::from_json(&psi.to_json()).unwrap();
        assert!(back.register().same_layout(psi.register()));
        assert_eq!(back.leakage().to_bits(), psi.leakage().to_bits());
        for (a, b) in psi.amplitudes().iter().zip(back.amplitudes()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn operator_round_trip() {
        let reg = ModeRegister::new(vec!["a"], vec![4]).unwrap();
        let a = annihilation(&reg, "a").unwrap();
        let back = FockOperator::from_json(&a.to_json()).unwrap();
        assert!((&a - &back).frobenius_norm() == 0.0);
    }

    #[test]
    fn density_round_trip() {
        let reg = ModeRegister::new(vec!["a"], vec![2]).unwrap();
        let rho = DensityMatrix::from_diagonal(&reg, &[0.25, 0.5, 0.25], 1e-14).unwrap();
        let back = DensityMatrix::from_json(&rho.to_json()).unwrap();
        assert!((rho.matrix() - back.matrix()).norm() == 0.0);
    }
}
