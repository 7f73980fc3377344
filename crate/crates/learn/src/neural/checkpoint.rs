//! Binary checkpoint format.
//!
//! All integers are little-endian.
//!
//! ```text
//! magic      b"RNDQ"
//! version    u32 (currently 1)
//! kind       u8  (0 = Q-network, 1 = graph regressor)
//! config     u64 embed_dim, u64 hidden, u64 rounds
//! has_adam   u8
//! [adam]     u64 step, f64 lr, f64 beta1, f64 beta2, f64 eps
//! count      u32
//! tensors    count x { u32 name_len, name (UTF-8), u32 rank, rank x u64 dim,
//!                      prod(dims) x f64 row-major }
//! ```
//!
//! Adam moments are stored as extra tensors named `adam.m.<name>` and
//! `adam.v.<name>` after the parameters.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use super::{AdamState, NetConfig, NetScalar, Parameters};
use crate::error::{LearnError, Result};

pub const MAGIC: &[u8; 4] = b"RNDQ";
pub const VERSION: u32 = 1;

fn bad(msg: impl Into<String>) -> LearnError {
    LearnError::Checkpoint(msg.into())
}

fn write_tensor<T: NetScalar, W: Write>(w: &mut W, name: &str, t: &Array2<T>) -> Result<()> {
    w.write_all(&(name.len() as u32).to_le_bytes())?;
    w.write_all(name.as_bytes())?;
    w.write_all(&2u32.to_le_bytes())?;
    for dim in [t.nrows(), t.ncols()] {
        w.write_all(&(dim as u64).to_le_bytes())?;
    }
    for x in t.iter() {
        let x = x
            .to_f64()
            .ok_or_else(|| bad("value not representable as f64"))?;
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

/// Writes `params` and optionally the optimizer state.
pub fn write<T, P, W>(mut w: W, params: &P, adam: Option<&AdamState<P>>) -> Result<()>
where
    T: NetScalar,
    P: Parameters<T>,
    W: Write,
{
    let cfg = params.config();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[P::KIND])?;
    for x in [cfg.embed_dim, cfg.hidden, cfg.rounds] {
        w.write_all(&(x as u64).to_le_bytes())?;
    }
    w.write_all(&[u8::from(adam.is_some())])?;
    if let Some(st) = adam {
        w.write_all(&st.step.to_le_bytes())?;
        for x in [st.lr, st.beta1, st.beta2, st.eps] {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    let names = params.names();
    let sets = 1 + 2 * usize::from(adam.is_some());
    w.write_all(&((names.len() * sets) as u32).to_le_bytes())?;
    for (name, t) in names.iter().zip(params.tensors()) {
        write_tensor(&mut w, name, t)?;
    }
    if let Some(st) = adam {
        for (prefix, set) in [("adam.m.", &st.first), ("adam.v.", &st.second)] {
            for (name, t) in names.iter().zip(set.tensors()) {
                write_tensor(&mut w, &format!("{prefix}{name}"), t)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner
            .read_exact(&mut buf)
            .map_err(|e| bad(format!("truncated checkpoint: {e}")))?;
        Ok(buf)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| bad("size overflows usize"))
    }

    /// Reads one tensor, checking its name and shape against `expected`.
    fn tensor_into<T: NetScalar>(&mut self, name: &str, expected: &mut Array2<T>) -> Result<()> {
        let len = self.u32()? as usize;
        if len > 1 << 16 {
            return Err(bad("tensor name too long"));
        }
        let mut raw = vec![0u8; len];
        self.inner
            .read_exact(&mut raw)
            .map_err(|e| bad(format!("truncated checkpoint: {e}")))?;
        let got = String::from_utf8(raw).map_err(|_| bad("tensor name is not UTF-8"))?;
        if got != name {
            return Err(bad(format!("expected tensor {name:?}, found {got:?}")));
        }
        let rank = self.u32()?;
        if rank != 2 {
            return Err(bad(format!("tensor {name} has rank {rank}, expected 2")));
        }
        let dims = (self.usize()?, self.usize()?);
        if dims != expected.dim() {
            return Err(LearnError::ShapeMismatch(format!(
                "tensor {name} is {dims:?}, expected {:?}",
                expected.dim()
            )));
        }
        for x in expected.iter_mut() {
            *x = T::from_f64_lossy(self.f64()?);
        }
        Ok(())
    }
}

/// Reads parameters and, if present, optimizer state.
pub fn read<T, P, R>(r: R) -> Result<(P, Option<AdamState<P>>)>
where
    T: NetScalar,
    P: Parameters<T>,
    R: Read,
{
    let mut r = Reader { inner: r };
    if &r.bytes::<4>()? != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let kind = r.u8()?;
    if kind != P::KIND {
        return Err(bad(format!(
            "checkpoint holds parameter kind {kind}, expected {}",
            P::KIND
        )));
    }
    let config = NetConfig {
        embed_dim: r.usize()?,
        hidden: r.usize()?,
        rounds: r.usize()?,
    };
    config.validate()?;
    if config.embed_dim > 1 << 16 || config.hidden > 1 << 16 {
        return Err(bad("implausible network size"));
    }
    let has_adam = match r.u8()? {
        0 => false,
        1 => true,
        x => return Err(bad(format!("bad optimizer flag {x}"))),
    };
    let mut params = P::zeroed(config);
    let mut adam = if has_adam {
        let mut st = AdamState::new(&params, 0.0);
        st.step = r.u64()?;
        st.lr = r.f64()?;
        st.beta1 = r.f64()?;
        st.beta2 = r.f64()?;
        st.eps = r.f64()?;
        Some(st)
    } else {
        None
    };
    let names = params.names();
    let count = r.u32()? as usize;
    let expected_count = names.len() * (1 + 2 * usize::from(has_adam));
    if count != expected_count {
        return Err(bad(format!("{count} tensors, expected {expected_count}")));
    }
    for (name, t) in names.iter().zip(params.tensors_mut()) {
        r.tensor_into(name, t)?;
    }
    if let Some(st) = adam.as_mut() {
        for (prefix, set) in [("adam.m.", &mut st.first), ("adam.v.", &mut st.second)] {
            for (name, t) in names.iter().zip(set.tensors_mut()) {
                r.tensor_into(&format!("{prefix}{name}"), t)?;
            }
        }
    }
    let mut rest = [0u8; 1];
    if r.inner.read(&mut rest)? != 0 {
        return Err(bad("trailing bytes after last tensor"));
    }
    Ok((params, adam))
}

/// Parameter kind byte of a checkpoint, after checking magic and version.
pub fn peek_kind<R: Read>(r: R) -> Result<u8> {
    let mut r = Reader { inner: r };
    if &r.bytes::<4>()? != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    r.u8()
}

pub fn save<T, P, Q>(path: Q, params: &P, adam: Option<&AdamState<P>>) -> Result<()>
where
    T: NetScalar,
    P: Parameters<T>,
    Q: AsRef<Path>,
{
    write(BufWriter::new(File::create(path)?), params, adam)
}

pub fn load<T, P, Q>(path: Q) -> Result<(P, Option<AdamState<P>>)>
where
    T: NetScalar,
    P: Parameters<T>,
    Q: AsRef<Path>,
{
    read(BufReader::new(File::open(path)?))
}
