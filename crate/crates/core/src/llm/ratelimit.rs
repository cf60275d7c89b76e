use std::sync::Mutex;
use std::time::{Duration, Instant};

/// Token bucket holding at most `burst` requests, refilled at
/// `requests_per_minute`. Callers block in [`RateLimiter::acquire`].
#[derive(Debug)]
pub struct RateLimiter {
    per_token: Duration,
    burst: f64,
    state: Mutex<(f64, Instant)>,
}

impl RateLimiter {
    pub fn new(requests_per_minute: u32, burst: u32) -> Self {
        let rpm = requests_per_minute.max(1);
        let burst = f64::from(burst.max(1));
        RateLimiter {
            per_token: Duration::from_secs_f64(60.0 / f64::from(rpm)),
            burst,
            state: Mutex::new((burst, Instant::now())),
        }
    }

    /// Takes one token, sleeping until one is available. The lock is held
    /// while sleeping so waiting callers are served one at a time.
    pub fn acquire(&self) {
        let mut guard = self.state.lock().unwrap_or_else(|e| e.into_inner());
        let (tokens, last) = &mut *guard;
        let now = Instant::now();
        let refill = now.duration_since(*last).as_secs_f64() / self.per_token.as_secs_f64();
        *tokens = (*tokens + refill).min(self.burst);
        *last = now;
        if *tokens < 1.0 {
            let wait = self.per_token.mul_f64(1.0 - *tokens);
            std::thread::sleep(wait);
            *tokens = 1.0;
            *last = Instant::now();
        }
        *tokens -= 1.0;
    }
}
