//! On-disk store for expansion tables.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic   b"RSCT"
//! version u32        (currently 1)
//! n       u32        number of factors
//! rows    u32        k_max + 1
//! per row:
//!   len   u64        number of coefficients (degree + 1, 0 for the zero row)
//!   per coefficient:
//!     bytes u32      length of the magnitude
//!     ...            magnitude, little-endian
//! ```
//!
//! Files are written under a temporary name and renamed into place, so a
//! concurrent reader sees either the old file, the new file, or nothing.

use std::fs;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::polycore::{CoeffTable, IntPoly};
use crate::ranks::TiePattern;

const MAGIC: &[u8; 4] = b"RSCT";
pub const FORMAT_VERSION: u32 = 1;

/// Identifies a cached table: sample sizes and the tie pattern of the ranks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub n: usize,
    pub n1: usize,
    pub pattern: TiePattern,
}

impl CacheKey {
    pub fn new(n1: usize, pattern: TiePattern) -> Self {
        CacheKey {
            n: pattern.n(),
            n1,
            pattern,
        }
    }

    /// `n{N}-k{n1}-{hex bits}.rsct`, bits packed most significant first.
    pub fn file_name(&self) -> String {
        let mut hex = String::new();
        for chunk in self.pattern.bits().chunks(4) {
            let nibble = chunk.iter().fold(0u8, |acc, &b| acc << 1 | b as u8) << (4 - chunk.len());
            hex.push(char::from_digit(nibble as u32, 16).expect("nibble"));
        }
        if hex.is_empty() {
            hex.push('_');
        }
        format!("n{}-k{}-{hex}.rsct", self.n, self.n1)
    }
}

pub fn write_table<W: Write>(mut out: W, table: &CoeffTable) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&u32::try_from(table.n()).map_err(too_big)?.to_le_bytes())?;
    out.write_all(
        &u32::try_from(table.rows().len())
            .map_err(too_big)?
            .to_le_bytes(),
    )?;
    for row in table.rows() {
        out.write_all(&(row.coeffs().len() as u64).to_le_bytes())?;
        for c in row.coeffs() {
            let bytes = if c.bits() == 0 {
                Vec::new()
            } else {
                c.to_bytes_le()
            };
            out.write_all(&u32::try_from(bytes.len()).map_err(too_big)?.to_le_bytes())?;
            out.write_all(&bytes)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn too_big<E>(_: E) -> Error {
    Error::CacheFormat("value too large for the file layout".into())
}

fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    input.read_exact(&mut buf).map_err(truncated)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf).map_err(truncated)?;
    Ok(u64::from_le_bytes(buf))
}

fn truncated(e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        Error::CacheFormat("truncated file".into())
    } else {
        Error::Io(e)
    }
}

pub fn read_table<R: Read>(mut input: R) -> Result<CoeffTable> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MAGIC {
        return Err(Error::CacheFormat("bad magic".into()));
    }
    let version = read_u32(&mut input)?;
    if version != FORMAT_VERSION {
        return Err(Error::CacheFormat(format!(
            "version {version}, expected {FORMAT_VERSION}"
        )));
    }
    let n = read_u32(&mut input)? as usize;
    let rows = read_u32(&mut input)? as usize;
    if rows == 0 || rows > n + 1 {
        return Err(Error::CacheFormat(format!("{rows} rows for {n} factors")));
    }
    let mut table = Vec::with_capacity(rows);
    for _ in 0..rows {
        let len = read_u64(&mut input)?;
        let mut coeffs = Vec::new();
        for _ in 0..len {
            let bytes = read_u32(&mut input)? as usize;
            let mut buf = vec![0u8; bytes];
            input.read_exact(&mut buf).map_err(truncated)?;
            coeffs.push(BigUint::from_bytes_le(&buf));
        }
        if coeffs.last().is_some_and(|c| c.bits() == 0) {
            return Err(Error::CacheFormat(
                "row has a trailing zero coefficient".into(),
            ));
        }
        table.push(IntPoly::from_coeffs(coeffs));
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::CacheFormat("trailing bytes".into()));
    }
    CoeffTable::new(table, n)
}

/// Directory of cached tables, safe to share between threads and processes.
#[derive(Clone, Debug)]
pub struct DiskCache {
    dir: PathBuf,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl DiskCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(DiskCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    pub fn load(&self, key: &CacheKey) -> Result<Option<CoeffTable>> {
        let file = match fs::File::open(self.path_for(key)) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let table = read_table(BufReader::new(file))?;
        if table.n() != key.n {
            return Err(Error::CacheFormat(format!(
                "file holds N = {}, key has N = {}",
                table.n(),
                key.n
            )));
        }
        Ok(Some(table))
    }

    pub fn store(&self, key: &CacheKey, table: &CoeffTable) -> Result<()> {
        let tmp = self.dir.join(format!(
            ".{}.{}.{}.tmp",
            key.file_name(),
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let result = (|| {
            let file = fs::File::create(&tmp)?;
            write_table(BufWriter::new(&file), table)?;
            file.sync_all()?;
            fs::rename(&tmp, self.path_for(key))?;
            Ok(())
        })();
        if result.is_err() {
            let _ = fs::remove_file(&tmp);
        }
        result
    }

    /// Returns the cached table or computes, stores, and returns it.
    pub fn get_or_insert_with(
        &self,
        key: &CacheKey,
        compute: impl FnOnce() -> Result<CoeffTable>,
    ) -> Result<CoeffTable> {
        if let Some(table) = self.load(key)? {
            return Ok(table);
        }
        let table = compute()?;
        self.store(key, &table)?;
        Ok(table)
    }
}
