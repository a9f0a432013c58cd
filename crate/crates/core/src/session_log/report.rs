use super::Telemetry;
use crate::scoring::{CookingItem, TaskScorecard};

/// Milliseconds as seconds with two decimals, rounded half-up.
pub(crate) fn seconds_2dp(ms: u64) -> String {
    let centis = (ms + 5) / 10;
    format!("{}.{:02}", centis / 100, centis % 100)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Plain-text session report: one `label: value` line per field, LF endings.
pub fn export_report(card: &TaskScorecard, telemetry: &Telemetry) -> String {
    let mut out = String::from("vreal session report\n");
    let mut line = |label: &str, value: &str| {
        out.push_str(label);
        out.push_str(": ");
        out.push_str(value);
        out.push('\n');
    };

    let intent: Vec<&str> = card.pm_notes_intent.iter().map(|b| yes_no(*b)).collect();
    line("pm_notes_intent", &intent.join(","));
    line("immediate_recognition", &format!("{}/20", card.immediate_recognition));
    line("planning_route_score", &card.planning.route_score.to_string());
    line("planning_time_modifier", &format!("{:+}", card.planning.time_modifier));
    line("planning_total", &card.planning.total.to_string());
    for item in CookingItem::ALL {
        let band = card.cooking.bands.get(&item).map(|b| format!("{b:?}")).unwrap_or_default();
        let points = card.cooking.points.get(&item).copied().unwrap_or(0);
        line(&format!("cooking_{}", item.as_str()), &format!("{band} {points}"));
    }
    line("cooking_total", &card.cooking.total.to_string());
    for (task, points) in &card.pm_scores {
        let depth = card.pm_prompt_depths.get(task).copied().unwrap_or(0);
        line(&format!("pm_{}", task.as_str()), &format!("{points} (depth {depth})"));
    }
    line("pm_total", &card.pm_total().to_string());
    line(
        "collection",
        &format!("{}/6 errors {}", card.collection.points, card.collection.errors),
    );
    let v = &card.visual_attention;
    line("visual_attention", &v.points.to_string());
    for (side, c) in [("left", &v.left), ("right", &v.right)] {
        line(
            &format!("visual_attention_{side}"),
            &format!("targets {} shape {} color {}", c.targets, c.shape_distractors, c.color_distractors),
        );
    }
    line("delayed_recognition", &format!("{}/20", card.delayed_recognition));
    let a = &card.auditory_attention;
    line("auditory_attention", &a.points.to_string());
    line(
        "auditory_attention_detected",
        &format!("targets {} high {} low {}", a.detected.targets, a.detected.high_pitch, a.detected.low_pitch),
    );
    line("auditory_attention_sides", &format!("left {} right {}", a.left, a.right));
    line("auditory_attention_wrong_controller", &a.wrong_controller.to_string());

    for (scene, ms) in &telemetry.tutorial_time_ms {
        line(&format!("tutorial_time_s[{scene}]"), &seconds_2dp(*ms));
    }
    for (scene, n) in &telemetry.practice_attempts {
        line(&format!("practice_attempts[{scene}]"), &n.to_string());
    }
    for (scene, views) in &telemetry.notes_views {
        line(
            &format!("notes_views[{scene}]"),
            &format!("{} opens {} s", views.opens, seconds_2dp(views.open_ms)),
        );
    }
    for (scene, ms) in &telemetry.scene_time_ms {
        line(&format!("scene_time_s[{scene}]"), &seconds_2dp(*ms));
    }
    for (scene, ms) in &telemetry.task_time_ms {
        line(&format!("task_time_s[{scene}]"), &seconds_2dp(*ms));
    }
    let total: u64 = telemetry.scene_time_ms.values().sum();
    line("session_time_s", &seconds_2dp(total));
    for warning in &telemetry.warnings {
        line("warning", warning);
    }
    out
}
