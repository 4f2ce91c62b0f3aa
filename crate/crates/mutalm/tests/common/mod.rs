#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use mutalm::remote::{stub_response, WireRequest};

pub type Handler = dyn Fn(usize, &str) -> (u16, String) + Send + Sync;

/// Minimal HTTP/1.1 server answering POST bodies with `handler(call, body)`.
pub struct MockServer {
    pub url: String,
    pub calls: Arc<AtomicUsize>,
    pub peak: Arc<AtomicUsize>,
}

impl MockServer {
    pub fn start(delay: Duration, handler: Arc<Handler>) -> MockServer {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let calls = Arc::new(AtomicUsize::new(0));
        let peak = Arc::new(AtomicUsize::new(0));
        let live = Arc::new(AtomicUsize::new(0));
        let (c, p) = (calls.clone(), peak.clone());
        thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(stream) = stream else { continue };
                let (c, p, l, h) = (c.clone(), p.clone(), live.clone(), handler.clone());
                thread::spawn(move || serve(stream, delay, &c, &p, &l, &*h));
            }
        });
        MockServer { url, calls, peak }
    }

    /// Answers every request like the offline stub.
    pub fn stub() -> MockServer {
        Self::start(Duration::ZERO, Arc::new(|_, body| stub_answer(body)))
    }
}

pub fn stub_answer(body: &str) -> (u16, String) {
    match serde_json::from_str::<WireRequest>(body) {
        Ok(req) => (200, serde_json::to_string(&stub_response(&req)).unwrap()),
        Err(_) => (400, "{}".into()),
    }
}

fn serve(
    stream: TcpStream,
    delay: Duration,
    calls: &AtomicUsize,
    peak: &AtomicUsize,
    live: &AtomicUsize,
    handler: &Handler,
) {
    let _ = stream.set_nodelay(true);
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut writer = stream;
    loop {
        let mut len = 0usize;
        let mut line = String::new();
        if reader.read_line(&mut line).unwrap_or(0) == 0 {
            return;
        }
        loop {
            line.clear();
            if reader.read_line(&mut line).unwrap_or(0) == 0 {
                return;
            }
            let l = line.trim_end();
            if l.is_empty() {
                break;
            }
            if let Some((k, v)) = l.split_once(':') {
                if k.eq_ignore_ascii_case("content-length") {
                    len = v.trim().parse().unwrap_or(0);
                }
            }
        }
        let mut body = vec![0u8; len];
        if reader.read_exact(&mut body).is_err() {
            return;
        }
        let n = calls.fetch_add(1, Ordering::SeqCst);
        let now = live.fetch_add(1, Ordering::SeqCst) + 1;
        peak.fetch_max(now, Ordering::SeqCst);
        thread::sleep(delay);
        let (status, text) = handler(n, &String::from_utf8_lossy(&body));
        live.fetch_sub(1, Ordering::SeqCst);
        let reason = match status {
            200 => "OK",
            400 => "Bad Request",
            503 => "Service Unavailable",
            _ => "Status",
        };
        let msg = format!(
            "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n{text}",
            text.len()
        );
        if writer.write_all(msg.as_bytes()).is_err() {
            return;
        }
    }
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

/// Run the CLI in-process and return (code, stdout, stderr).
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["mutalm"];
    argv.extend_from_slice(args);
    let code = mutalm::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}
