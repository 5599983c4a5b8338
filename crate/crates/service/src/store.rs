//! Session storage: an in-memory map written through to one JSON file.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use rand::rngs::OsRng;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::session::Wizard;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    /// Unix seconds.
    pub created: u64,
    pub updated: u64,
    #[serde(flatten)]
    pub wizard: Wizard,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("no session `{0}`")]
    NotFound(String),
    #[error("session `{0}` is busy with another request")]
    Conflict(String),
    #[error("session store: {0}")]
    Io(#[from] io::Error),
}

#[derive(Serialize, Deserialize)]
struct StoreFile {
    sessions: Vec<Session>,
}

struct Entry {
    session: Session,
    busy: bool,
}

pub type Clock = Arc<dyn Fn() -> u64 + Send + Sync>;

fn system_clock() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// 128 random bits from the operating system, as 32 hex digits.
pub fn fresh_id() -> String {
    let mut bytes = [0u8; 16];
    OsRng.fill_bytes(&mut bytes);
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct SessionStore {
    path: Option<PathBuf>,
    idle: Duration,
    clock: Clock,
    entries: Mutex<HashMap<String, Entry>>,
}

impl SessionStore {
    /// A store that is never written to disk.
    pub fn in_memory(idle: Duration) -> Self {
        Self {
            path: None,
            idle,
            clock: Arc::new(system_clock),
            entries: Mutex::new(HashMap::new()),
        }
    }

    /// Opens the store at `path`, loading unexpired sessions if the file exists.
    pub fn open(path: impl Into<PathBuf>, idle: Duration) -> Result<Self, StoreError> {
        let path = path.into();
        let mut store = Self::in_memory(idle);
        if path.exists() {
            let text = fs::read_to_string(&path)?;
            let file: StoreFile = serde_json::from_str(&text)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
            let entries = store.entries.get_mut().unwrap();
            for session in file.sessions {
                entries.insert(session.id.clone(), Entry { session, busy: false });
            }
        }
        store.path = Some(path);
        store.sweep();
        Ok(store)
    }

    pub fn with_clock(mut self, clock: Clock) -> Self {
        self.clock = clock;
        self
    }

    fn now(&self) -> u64 {
        (self.clock)()
    }

    fn lock(&self) -> MutexGuard<'_, HashMap<String, Entry>> {
        self.entries.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn expired(&self, s: &Session, now: u64) -> bool {
        now.saturating_sub(s.updated) > self.idle.as_secs()
    }

    /// Drops idle sessions that are not in use.
    pub fn sweep(&self) {
        let now = self.now();
        let mut map = self.lock();
        let before = map.len();
        map.retain(|_, e| e.busy || !self.expired(&e.session, now));
        if map.len() != before {
            let _ = self.persist(&map);
        }
    }

    fn persist(&self, map: &HashMap<String, Entry>) -> Result<(), StoreError> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let mut sessions: Vec<Session> = map.values().map(|e| e.session.clone()).collect();
        sessions.sort_by(|a, b| a.id.cmp(&b.id));
        let text = serde_json::to_string_pretty(&StoreFile { sessions })
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn create(&self) -> Result<Session, StoreError> {
        self.sweep();
        let now = self.now();
        let session = Session {
            id: fresh_id(),
            created: now,
            updated: now,
            wizard: Wizard::new(),
        };
        let mut map = self.lock();
        map.insert(
            session.id.clone(),
            Entry {
                session: session.clone(),
                busy: false,
            },
        );
        self.persist(&map)?;
        Ok(session)
    }

    fn live<'m>(
        &self,
        map: &'m mut HashMap<String, Entry>,
        id: &str,
    ) -> Result<&'m mut Entry, StoreError> {
        let now = self.now();
        let stale = map
            .get(id)
            .is_some_and(|e| !e.busy && self.expired(&e.session, now));
        if stale {
            map.remove(id);
            self.persist(map)?;
        }
        map.get_mut(id).ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    pub fn get(&self, id: &str) -> Result<Session, StoreError> {
        let mut map = self.lock();
        Ok(self.live(&mut map, id)?.session.clone())
    }

    /// Claims the session for a mutation. Fails with `Conflict` while
    /// another mutation holds it.
    pub fn begin(&self, id: &str) -> Result<Session, StoreError> {
        let mut map = self.lock();
        let entry = self.live(&mut map, id)?;
        if entry.busy {
            return Err(StoreError::Conflict(id.to_string()));
        }
        entry.busy = true;
        Ok(entry.session.clone())
    }

    /// Publishes an intermediate state of a claimed session.
    pub fn stage(&self, mut session: Session) -> Result<(), StoreError> {
        let mut map = self.lock();
        session.updated = self.now();
        let entry = map
            .get_mut(&session.id)
            .ok_or_else(|| StoreError::NotFound(session.id.clone()))?;
        entry.session = session;
        self.persist(&map)
    }

    /// Releases a claimed session, storing `session` if given.
    pub fn finish(&self, id: &str, session: Option<Session>) -> Result<(), StoreError> {
        let mut map = self.lock();
        let now = self.now();
        let entry = map
            .get_mut(id)
            .ok_or_else(|| StoreError::NotFound(id.to_string()))?;
        entry.busy = false;
        if let Some(mut s) = session {
            s.updated = now;
            entry.session = s;
            self.persist(&map)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicU64, Ordering};

    #[test]
    fn ids_are_distinct_and_long() {
        let a = fresh_id();
        assert_eq!(a.len(), 32);
        assert_ne!(a, fresh_id());
    }

    #[test]
    fn busy_sessions_conflict() {
        let store = SessionStore::in_memory(Duration::from_secs(60));
        let s = store.create().unwrap();
        store.begin(&s.id).unwrap();
        assert!(matches!(store.begin(&s.id), Err(StoreError::Conflict(_))));
        store.finish(&s.id, None).unwrap();
        store.begin(&s.id).unwrap();
    }

    #[test]
    fn idle_sessions_expire() {
        let now = Arc::new(AtomicU64::new(1_000));
        let t = now.clone();
        let store = SessionStore::in_memory(Duration::from_secs(10))
            .with_clock(Arc::new(move || t.load(Ordering::SeqCst)));
        let s = store.create().unwrap();
        now.store(1_010, Ordering::SeqCst);
        assert!(store.get(&s.id).is_ok());
        now.store(1_011, Ordering::SeqCst);
        assert!(matches!(store.get(&s.id), Err(StoreError::NotFound(_))));
        assert!(store.is_empty());
    }

    #[test]
    fn sessions_survive_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sessions.json");
        let id = {
            let store = SessionStore::open(&path, Duration::from_secs(3600)).unwrap();
            store.create().unwrap().id
        };
        let store = SessionStore::open(&path, Duration::from_secs(3600)).unwrap();
        assert_eq!(store.get(&id).unwrap().id, id);
    }
}
