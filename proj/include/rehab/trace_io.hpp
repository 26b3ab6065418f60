#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rehab/adaptation.hpp"
#include "rehab/metrics.hpp"
#include "rehab/simulator.hpp"

namespace rehab {

// Frame CSV schema (22 columns):
//   t, then per joint in wrist/elbow/shoulder order: orientation x,y,z and
//   position x,y,z, then head_tilt, spine_tilt, pedal.
// Numbers are shortest round-trip decimals, so identical frames serialize to
// identical bytes.
void write_frames_csv(std::ostream& out, const std::vector<MotionFrame>& frames);

// Parses the schema above; header required, t strictly increasing. Errors
// carry the 1-based line number.
std::vector<MotionFrame> read_frames_csv(std::istream& in);
std::vector<MotionFrame> load_frames_csv(const std::string& path);

// One JSON object per line. `task` is the 0-based task index the event or
// decision belongs to; `time_offset` shifts the per-task timestamps into the
// session-global timeline.
void write_events_jsonl(std::ostream& out, int task, double time_offset,
                        const std::vector<TaskEvent>& events);
void write_decision_jsonl(std::ostream& out, int task, double time_offset,
                          const DecisionRecord& rec);

// Reads events.jsonl, ignoring task indices (timestamps kept as written).
std::vector<TaskEvent> read_events_jsonl(std::istream& in);
std::vector<TaskEvent> load_events_jsonl(const std::string& path);

// Session config JSON. Every field is optional and falls back to the struct
// default; unknown keys are rejected so typos cannot silently change a run.
SessionConfig parse_config_json(const std::string& text);
SessionConfig load_config_file(const std::string& path);

}  // namespace rehab
