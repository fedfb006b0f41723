//! Starts the service in-process, lets two scripted participants play it
//! through HTTP, and prints the analysis of the export.

use sonoscape::analysis::build_report;
use sonoscape::config::Config;
use sonoscape::robot::{Profile, Robot, RobotOptions};
use sonoscape::service::{bind, serve, AppState};

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let config = Config {
        data_dir: dir.path().to_path_buf(),
        port: 0,
        ..Config::default()
    };
    let state = AppState::open(config.clone())?;
    let listener = bind(&config).await?;
    let base_url = format!("http://{}", listener.local_addr()?);
    let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
    let server = tokio::spawn(serve(state, listener, async {
        stopped.await.ok();
    }));

    let robot = Robot::new(RobotOptions {
        base_url,
        sessions: 2,
        profile: Profile::Sloppy {
            pmiss: 0.2,
            pfa: 0.05,
            delay: 0.8,
        },
        level_seed: config.level_seed,
        frame_rate: config.frame_rate,
        seed: 1,
        fetch_audio: false,
    })?;
    for s in robot.run().await? {
        println!("session {} on {}: {} qualifier attempts", s.session_id, s.ecology, s.qualify_attempts);
    }
    let report = build_report(&robot.export().await?);
    stop.send(()).ok();
    server.await??;

    for r in &report.sensitivity {
        println!("{:<6} {:<8} H {:.2}  FA {:.2}  d' {:.3}", r.ecology, r.stimulus.label(), r.h, r.fa, r.d_prime);
    }
    for t in &report.annotation_times {
        if let Some(ms) = t.mean_ms {
            println!("{:<6} {:<8} annotation time {ms:.0} ms over {} hits", t.ecology, t.stimulus.label(), t.hits);
        }
    }
    Ok(())
}
