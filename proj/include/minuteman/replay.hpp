#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "minuteman/errors.hpp"
#include "minuteman/pipeline.hpp"
#include "minuteman/transcript_doc.hpp"

namespace minuteman::replay {

/// The manifest cannot be loaded or does not fit the meeting it drives.
class ManifestError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct ScriptedUtterance {
  double start_s = 0;
  double duration_s = 0;
  std::string text;
};

struct TrackSpec {
  std::string track_id;
  std::string speaker_label;  // empty: the track id is shown
  std::vector<ScriptedUtterance> utterances;
  std::optional<std::filesystem::path> wav;
};

/// Names one pad line at the time an action runs.
struct LineRef {
  std::optional<std::uint64_t> utt_seq;
  std::optional<std::uint64_t> summary_id;
  std::optional<std::size_t> index;
};

enum class ActionKind { kEdit, kSummarize, kConfig, kDebug };
enum class EditKind { kReplaceText, kFindReplace, kAppend, kDeleteLine, kInsertLineAfter, kRaw };

struct Action {
  double at_s = 0;
  ActionKind kind = ActionKind::kEdit;

  // kEdit
  std::string doc;
  EditKind edit = EditKind::kRaw;
  LineRef line;
  std::string text;
  std::string find;
  doc::Components components;
  std::optional<std::uint64_t> base_revision;
  std::string author = "replay-user";

  // kSummarize
  doc::SegmentRange range;
  // kConfig
  int chunk_length_words = 0;
  // kDebug
  bool debug = false;
};

struct Manifest {
  int version = 1;
  std::optional<int> chunk_length_words;
  std::optional<std::string> mode;
  std::uint64_t seed = 0;
  std::vector<TrackSpec> tracks;
  std::vector<Action> actions;  // sorted by at_s, stable
};

/// Parses a version 1 YAML manifest. Relative wav paths resolve against
/// `base_dir`. Throws ManifestError.
Manifest parse_manifest(const std::string& yaml, const std::filesystem::path& base_dir = {});
Manifest load_manifest(const std::filesystem::path& path);

/// One second of a track's synthetic speech: a tone plus noise, unique per
/// (seed, track, second) so every utterance hashes differently.
std::vector<std::int16_t> synth_chunk(std::uint64_t seed, std::size_t track_index,
                                      std::uint64_t chunk_seq);

struct TrackAudio {
  std::string track_id;
  std::vector<std::vector<std::int16_t>> chunks;
};

/// Audio of every track, padded with silence to a common length.
std::vector<TrackAudio> render_tracks(const Manifest& manifest);

/// Mock ASR table for the scripted tracks: each utterance the segmenter will
/// cut is mapped to the words scripted for its seconds. Words of a scripted
/// utterance are spread evenly over its seconds.
std::map<std::string, std::string> mock_asr_manifest(const Manifest& manifest,
                                                     const std::vector<TrackAudio>& audio,
                                                     int max_utterance_s);

/// Turns an edit action into components against the current pad lines.
/// Throws ManifestError when the line or text it names does not exist.
doc::Components resolve_edit(const Action& action, const std::vector<doc::Line>& lines);

enum class Mode { kFast, kRealtime };

struct Options {
  Mode mode = Mode::kFast;
  std::optional<std::uint64_t> seed;
  /// Backends and tuning; the ASR backend is replaced by the generated mock
  /// when the manifest has scripted tracks.
  PipelineOptions pipeline;
  /// Virtual seconds between debounce checks.
  double tick_s = 0.25;
};

struct Result {
  std::string session_id;
  std::string transcript;
  std::string minutes;
  std::vector<std::string> events;
};

/// Runs the meeting through an in-process pipeline on virtual time.
Result run(const Manifest& manifest, const Options& options);

/// Drives a running gateway over HTTP instead.
Result run_remote(const Manifest& manifest, const Options& options, const std::string& server);

/// transcript.txt, minutes.txt and events.log.
void write_outputs(const Result& result, const std::filesystem::path& out_dir);

}  // namespace minuteman::replay
