use crate::config::CompressionConfig;

use super::CognitionError;

pub const MEMORY_ENV: &str = "AGENTGC_MEMORY_BYTES";

/// Fixed allowance for buffers, the coder and the process itself.
pub const BASE_OVERHEAD_BYTES: u64 = 16 * 1024 * 1024;

/// Available memory in bytes: the `AGENTGC_MEMORY_BYTES` override when set,
/// otherwise what the operating system reports as available.
pub fn probe_memory() -> Result<u64, CognitionError> {
    match std::env::var(MEMORY_ENV) {
        Ok(v) => parse_override(&v),
        Err(_) => os_available_memory()
            .ok_or_else(|| CognitionError::Memory("cannot determine available memory".into())),
    }
}

pub fn parse_override(v: &str) -> Result<u64, CognitionError> {
    match v.trim().parse::<u64>() {
        Ok(0) => Err(CognitionError::Memory(format!("{MEMORY_ENV} must be positive"))),
        Ok(n) => Ok(n),
        Err(_) => Err(CognitionError::Memory(format!("{MEMORY_ENV}={v:?} is not a byte count"))),
    }
}

pub fn os_available_memory() -> Option<u64> {
    meminfo_field("MemAvailable:").or_else(sysconf_available)
}

pub fn total_physical_memory() -> Option<u64> {
    meminfo_field("MemTotal:").or_else(|| sysconf_pages(libc::_SC_PHYS_PAGES))
}

fn meminfo_field(key: &str) -> Option<u64> {
    let text = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = text.lines().find(|l| l.starts_with(key))?;
    let kb: u64 = line[key.len()..].trim().trim_end_matches("kB").trim().parse().ok()?;
    Some(kb * 1024)
}

#[cfg(target_os = "linux")]
fn sysconf_available() -> Option<u64> {
    sysconf_pages(libc::_SC_AVPHYS_PAGES)
}

#[cfg(not(target_os = "linux"))]
fn sysconf_available() -> Option<u64> {
    sysconf_pages(libc::_SC_PHYS_PAGES)
}

fn sysconf_pages(name: libc::c_int) -> Option<u64> {
    // SAFETY: sysconf has no memory-safety preconditions.
    let (pages, size) = unsafe { (libc::sysconf(name), libc::sysconf(libc::_SC_PAGESIZE)) };
    (pages > 0 && size > 0).then(|| pages as u64 * size as u64)
}

/// `12 · parameter_count + 4 · ζ · c · embed + 16 MiB`.
pub fn estimate_memory(cfg: &CompressionConfig) -> Result<u64, CognitionError> {
    if cfg.batch == 0 {
        return Err(CognitionError::InvalidConfig("batch size must be positive".into()));
    }
    let params = cfg.model_config().parameter_count() as u64;
    let activations = 4 * cfg.batch as u64 * cfg.context as u64 * cfg.embed_dim as u64;
    Ok(12 * params + activations + BASE_OVERHEAD_BYTES)
}
