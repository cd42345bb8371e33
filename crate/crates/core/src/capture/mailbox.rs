use std::sync::{Arc, Mutex, MutexGuard};

use super::{CaptureError, FramePair};

/// One deposit: a frame pair and its sequence number, starting at 1.
#[derive(Debug, PartialEq)]
pub struct MailboxEntry {
    pub seq: u64,
    pub pair: FramePair,
}

/// Single-slot, last-writer-wins handoff of frame pairs.
///
/// A deposit swaps in a whole entry under a short lock and readers clone the
/// `Arc` of the current entry, so a reader always sees the left and right
/// frame of the same deposit and never holds the lock while using them.
#[derive(Debug, Default)]
pub struct FrameMailbox {
    slot: Mutex<Option<Arc<MailboxEntry>>>,
}

impl FrameMailbox {
    pub fn new() -> Self {
        Self::default()
    }

    fn lock(&self) -> MutexGuard<'_, Option<Arc<MailboxEntry>>> {
        // entries are replaced whole, so a poisoned slot is still consistent
        self.slot.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Replaces the stored pair and returns its sequence number.
    pub fn deposit(&self, pair: FramePair) -> u64 {
        let mut slot = self.lock();
        let seq = slot.as_ref().map_or(1, |e| e.seq + 1);
        *slot = Some(Arc::new(MailboxEntry { seq, pair }));
        seq
    }

    pub fn read_latest(&self) -> Result<Arc<MailboxEntry>, CaptureError> {
        self.lock().clone().ok_or(CaptureError::ReadBeforeFirstDeposit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{Rgba, RgbaImage};

    fn tagged(tag: u32) -> FramePair {
        let px = Rgba(tag.to_le_bytes());
        FramePair { left: RgbaImage::from_pixel(1, 1, px), right: RgbaImage::from_pixel(2, 1, px) }
    }

    #[test]
    fn read_before_deposit_fails() {
        assert!(matches!(FrameMailbox::new().read_latest(), Err(CaptureError::ReadBeforeFirstDeposit)));
    }

    #[test]
    fn latest_deposit_wins() {
        let m = FrameMailbox::new();
        assert_eq!(m.deposit(tagged(1)), 1);
        assert_eq!(m.read_latest().unwrap().pair, tagged(1));
        assert_eq!(m.deposit(tagged(2)), 2);
        let e = m.read_latest().unwrap();
        assert_eq!((e.seq, &e.pair), (2, &tagged(2)));
    }

    #[test]
    fn concurrent_readers_never_see_torn_pairs() {
        let m = FrameMailbox::new();
        m.deposit(tagged(0));
        std::thread::scope(|s| {
            for p in 0..2u32 {
                let m = &m;
                s.spawn(move || {
                    for i in 0..500u32 {
                        m.deposit(tagged(p << 16 | i));
                    }
                });
            }
            for _ in 0..2 {
                let m = &m;
                s.spawn(move || {
                    let mut last = 0;
                    for _ in 0..500 {
                        let e = m.read_latest().unwrap();
                        assert_eq!(e.pair.left.get_pixel(0, 0), e.pair.right.get_pixel(1, 0));
                        assert!(e.seq >= last);
                        last = e.seq;
                    }
                });
            }
        });
        assert_eq!(m.read_latest().unwrap().seq, 1001);
    }
}
