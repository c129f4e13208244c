#include "minuteman/replay.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "minuteman/audio.hpp"
#include "minuteman/audio_ingest.hpp"
#include "minuteman/clock.hpp"
#include "minuteman/segmenter.hpp"
#include "minuteman/text.hpp"

namespace minuteman::replay {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ManifestError(where + ": " + what);
}

void check_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) fail(where, "expected a mapping");
  for (const auto& kv : node) {
    auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
      fail(where, "unknown key '" + key + "'");
    }
  }
}

template <typename T>
T get(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(where, "has the wrong type");
  }
}

bool valid_track_id(const std::string& id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

LineRef parse_line_ref(const YAML::Node& node, const std::string& where) {
  check_keys(node, where, {"utt_seq", "summary_id", "index"});
  LineRef ref;
  if (node["utt_seq"]) ref.utt_seq = get<std::uint64_t>(node["utt_seq"], where + ".utt_seq");
  if (node["summary_id"]) {
    ref.summary_id = get<std::uint64_t>(node["summary_id"], where + ".summary_id");
  }
  if (node["index"]) ref.index = get<std::size_t>(node["index"], where + ".index");
  if ((ref.utt_seq ? 1 : 0) + (ref.summary_id ? 1 : 0) + (ref.index ? 1 : 0) != 1) {
    fail(where, "needs exactly one of utt_seq, summary_id, index");
  }
  return ref;
}

doc::Components parse_components(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) fail(where, "expected a list");
  doc::Components out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const auto item = node[i];
    const auto at = where + "[" + std::to_string(i) + "]";
    check_keys(item, at, {"retain", "delete", "insert", "attrs"});
    if (item["retain"]) {
      out.push_back(doc::Component::retain(get<std::size_t>(item["retain"], at)));
    } else if (item["delete"]) {
      out.push_back(doc::Component::erase(get<std::size_t>(item["delete"], at)));
    } else if (item["insert"]) {
      doc::LineAttrs attrs;
      if (auto a = item["attrs"]) {
        check_keys(a, at + ".attrs", {"utt_seq", "summary_id"});
        if (a["utt_seq"]) attrs.utt_seq = get<std::uint64_t>(a["utt_seq"], at);
        if (a["summary_id"]) attrs.summary_id = get<std::uint64_t>(a["summary_id"], at);
      }
      out.push_back(doc::Component::insert(get<std::string>(item["insert"], at), attrs));
    } else {
      fail(at, "needs retain, delete or insert");
    }
  }
  return out;
}

Action parse_edit(const YAML::Node& node, const std::string& where) {
  check_keys(node, where,
             {"doc", "line", "replace_text", "find", "replace", "append", "delete_line",
              "insert_line_after", "components", "base_revision", "author"});
  Action a;
  a.kind = ActionKind::kEdit;
  a.doc = node["doc"] ? get<std::string>(node["doc"], where + ".doc") : "";
  if (a.doc != "transcript" && a.doc != "summary") {
    fail(where + ".doc", "must be 'transcript' or 'summary'");
  }
  if (node["author"]) a.author = get<std::string>(node["author"], where + ".author");
  if (a.author.empty() || a.author == doc::kSystemAuthor) {
    fail(where + ".author", "must name a user");
  }
  int forms = 0;
  if (node["replace_text"]) {
    a.edit = EditKind::kReplaceText;
    a.text = get<std::string>(node["replace_text"], where + ".replace_text");
    ++forms;
  }
  if (node["find"] || node["replace"]) {
    if (!node["find"] || !node["replace"]) fail(where, "find and replace go together");
    a.edit = EditKind::kFindReplace;
    a.find = get<std::string>(node["find"], where + ".find");
    a.text = get<std::string>(node["replace"], where + ".replace");
    if (a.find.empty()) fail(where + ".find", "must not be empty");
    ++forms;
  }
  if (node["append"]) {
    a.edit = EditKind::kAppend;
    a.text = get<std::string>(node["append"], where + ".append");
    ++forms;
  }
  if (node["delete_line"]) {
    if (!get<bool>(node["delete_line"], where + ".delete_line")) {
      fail(where + ".delete_line", "must be true");
    }
    a.edit = EditKind::kDeleteLine;
    ++forms;
  }
  if (node["insert_line_after"]) {
    a.edit = EditKind::kInsertLineAfter;
    a.text = get<std::string>(node["insert_line_after"], where + ".insert_line_after");
    ++forms;
  }
  if (node["components"]) {
    a.edit = EditKind::kRaw;
    a.components = parse_components(node["components"], where + ".components");
    if (node["base_revision"]) {
      a.base_revision = get<std::uint64_t>(node["base_revision"], where + ".base_revision");
    }
    ++forms;
  }
  if (forms != 1) fail(where, "needs exactly one edit form");
  if (a.edit == EditKind::kRaw) {
    if (node["line"]) fail(where, "raw components take no line");
  } else {
    if (!node["line"]) fail(where, "needs a line");
    a.line = parse_line_ref(node["line"], where + ".line");
    if (node["base_revision"]) fail(where, "base_revision only applies to raw components");
  }
  if (a.text.find('\n') != std::string::npos && a.edit != EditKind::kRaw) {
    fail(where, "line edits take single-line text");
  }
  return a;
}

Action parse_action(const YAML::Node& node, const std::string& where) {
  check_keys(node, where, {"at_s", "edit", "summarize", "config", "debug"});
  if (!node["at_s"]) fail(where, "needs at_s");
  const auto at_s = get<double>(node["at_s"], where + ".at_s");
  if (!(at_s >= 0) || !std::isfinite(at_s)) fail(where + ".at_s", "must be >= 0");

  Action a;
  int kinds = 0;
  if (auto e = node["edit"]) {
    a = parse_edit(e, where + ".edit");
    ++kinds;
  }
  if (auto s = node["summarize"]) {
    check_keys(s, where + ".summarize", {"start_seq", "end_seq"});
    a.kind = ActionKind::kSummarize;
    a.range.start_seq = get<std::uint64_t>(s["start_seq"], where + ".summarize.start_seq");
    a.range.end_seq = get<std::uint64_t>(s["end_seq"], where + ".summarize.end_seq");
    if (a.range.start_seq == 0 || a.range.start_seq > a.range.end_seq) {
      fail(where + ".summarize", "needs 1 <= start_seq <= end_seq");
    }
    ++kinds;
  }
  if (auto c = node["config"]) {
    check_keys(c, where + ".config", {"chunk_length_words"});
    a.kind = ActionKind::kConfig;
    a.chunk_length_words = get<int>(c["chunk_length_words"], where + ".config.chunk_length_words");
    try {
      ingest::validate_chunk_length(a.chunk_length_words);
    } catch (const ValidationError& e) {
      fail(where + ".config", e.what());
    }
    ++kinds;
  }
  if (auto d = node["debug"]) {
    a.kind = ActionKind::kDebug;
    a.debug = get<bool>(d, where + ".debug");
    ++kinds;
  }
  if (kinds != 1) fail(where, "needs exactly one of edit, summarize, config, debug");
  a.at_s = at_s;
  return a;
}

TrackSpec parse_track(const YAML::Node& node, const std::string& where,
                      const std::filesystem::path& base_dir) {
  check_keys(node, where, {"track_id", "speaker_label", "utterances", "wav"});
  TrackSpec t;
  if (!node["track_id"]) fail(where, "needs track_id");
  t.track_id = get<std::string>(node["track_id"], where + ".track_id");
  if (!valid_track_id(t.track_id)) {
    fail(where + ".track_id", "use letters, digits, '_', '-' or '.'");
  }
  if (node["speaker_label"]) {
    t.speaker_label = get<std::string>(node["speaker_label"], where + ".speaker_label");
    if (t.speaker_label.find('\n') != std::string::npos) {
      fail(where + ".speaker_label", "must be one line");
    }
  }
  if (node["wav"] && node["utterances"]) fail(where, "has both wav and utterances");
  if (auto wav = node["wav"]) {
    std::filesystem::path p = get<std::string>(wav, where + ".wav");
    t.wav = p.is_absolute() ? p : base_dir / p;
    return t;
  }
  if (auto list = node["utterances"]) {
    if (!list.IsSequence()) fail(where + ".utterances", "expected a list");
    double previous_end = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto at = where + ".utterances[" + std::to_string(i) + "]";
      check_keys(list[i], at, {"start_s", "duration_s", "text"});
      ScriptedUtterance u;
      u.start_s = get<double>(list[i]["start_s"], at + ".start_s");
      u.duration_s = get<double>(list[i]["duration_s"], at + ".duration_s");
      if (list[i]["text"]) u.text = get<std::string>(list[i]["text"], at + ".text");
      if (!(u.start_s >= 0) || !std::isfinite(u.start_s)) fail(at, "start_s must be >= 0");
      if (!(u.duration_s > 0) || !std::isfinite(u.duration_s)) fail(at, "duration_s must be > 0");
      if (u.start_s < previous_end) {
        fail(at, "overlaps or precedes the previous utterance of the track");
      }
      previous_end = u.start_s + u.duration_s;
      t.utterances.push_back(std::move(u));
    }
  }
  return t;
}

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Chunks overlapping [start, start + duration).
std::pair<std::uint64_t, std::uint64_t> chunk_span(const ScriptedUtterance& u) {
  auto first = static_cast<std::uint64_t>(std::floor(u.start_s));
  auto last = static_cast<std::uint64_t>(std::ceil(u.start_s + u.duration_s));
  return {first, std::max(last, first + 1)};
}

std::size_t code_points(std::string_view s) { return text::utf8_length(s); }

}  // namespace

Manifest parse_manifest(const std::string& yaml, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception& e) {
    throw ManifestError(std::string("manifest is not valid YAML: ") + e.what());
  }
  if (!root.IsDefined() || root.IsNull()) throw ManifestError("manifest is empty");
  check_keys(root, "manifest",
             {"version", "chunk_length_words", "mode", "seed", "tracks", "actions"});
  Manifest m;
  if (!root["version"]) fail("manifest", "needs 'version: 1'");
  m.version = get<int>(root["version"], "version");
  if (m.version != 1) fail("version", "only version 1 is supported");
  if (root["chunk_length_words"]) {
    m.chunk_length_words = get<int>(root["chunk_length_words"], "chunk_length_words");
    try {
      ingest::validate_chunk_length(*m.chunk_length_words);
    } catch (const ValidationError& e) {
      fail("chunk_length_words", e.what());
    }
  }
  if (root["mode"]) {
    m.mode = get<std::string>(root["mode"], "mode");
    if (*m.mode != "fast" && *m.mode != "realtime") fail("mode", "must be fast or realtime");
  }
  if (root["seed"]) m.seed = get<std::uint64_t>(root["seed"], "seed");
  if (auto tracks = root["tracks"]) {
    if (!tracks.IsSequence()) fail("tracks", "expected a list");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      auto t = parse_track(tracks[i], "tracks[" + std::to_string(i) + "]", base_dir);
      if (!ids.insert(t.track_id).second) fail("tracks", "duplicate track_id " + t.track_id);
      m.tracks.push_back(std::move(t));
    }
  }
  if (auto actions = root["actions"]) {
    if (!actions.IsSequence()) fail("actions", "expected a list");
    for (std::size_t i = 0; i < actions.size(); ++i) {
      m.actions.push_back(parse_action(actions[i], "actions[" + std::to_string(i) + "]"));
    }
    std::stable_sort(m.actions.begin(), m.actions.end(),
                     [](const Action& a, const Action& b) { return a.at_s < b.at_s; });
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError("cannot read manifest " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_manifest(buffer.str(), path.parent_path());
}

std::vector<std::int16_t> synth_chunk(std::uint64_t seed, std::size_t track_index,
                                      std::uint64_t chunk_seq) {
  std::uint64_t state = seed * 0x100000001b3ULL ^ (track_index << 40) ^ chunk_seq;
  const double freq = 150.0 + static_cast<double>(splitmix(state) % 2000);
  std::vector<std::int16_t> samples(audio::kChunkSamples);
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const double tone =
        8000.0 * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(n) / audio::kSampleRate);
    const auto noise = static_cast<double>(static_cast<std::int64_t>(splitmix(state) % 1025) - 512);
    samples[n] = static_cast<std::int16_t>(std::lround(tone + noise));
  }
  return samples;
}

std::vector<TrackAudio> render_tracks(const Manifest& manifest) {
  std::vector<TrackAudio> out;
  std::size_t length = 0;
  for (std::size_t ti = 0; ti < manifest.tracks.size(); ++ti) {
    const auto& spec = manifest.tracks[ti];
    TrackAudio track;
    track.track_id = spec.track_id;
    if (spec.wav) {
      std::ifstream in(*spec.wav, std::ios::binary);
      if (!in) throw ManifestError("cannot read " + spec.wav->string());
      std::stringstream buffer;
      buffer << in.rdbuf();
      audio::WavData wav;
      try {
        wav = audio::wav_decode(buffer.str());
      } catch (const FormatError& e) {
        throw ManifestError(spec.wav->string() + ": " + e.what());
      }
      if (wav.sample_rate != audio::kSampleRate || wav.channels != 1) {
        throw ManifestError(spec.wav->string() + ": expected 16 kHz mono audio");
      }
      for (std::size_t at = 0; at < wav.samples.size(); at += audio::kChunkSamples) {
        std::vector<std::int16_t> chunk(audio::kChunkSamples, 0);
        auto n = std::min(audio::kChunkSamples, wav.samples.size() - at);
        std::copy_n(wav.samples.begin() + static_cast<std::ptrdiff_t>(at), n, chunk.begin());
        track.chunks.push_back(std::move(chunk));
      }
    } else {
      std::set<std::uint64_t> speech;
      for (const auto& u : spec.utterances) {
        auto [first, last] = chunk_span(u);
        for (auto c = first; c < last; ++c) speech.insert(c);
      }
      std::uint64_t end = speech.empty() ? 0 : *speech.rbegin() + 1;
      for (std::uint64_t c = 0; c < end; ++c) {
        track.chunks.push_back(speech.contains(c) ? synth_chunk(manifest.seed, ti, c)
                                                  : std::vector<std::int16_t>(audio::kChunkSamples, 0));
      }
    }
    length = std::max(length, track.chunks.size());
    out.push_back(std::move(track));
  }
  for (auto& track : out) {
    track.chunks.resize(length, std::vector<std::int16_t>(audio::kChunkSamples, 0));
  }
  return out;
}

std::map<std::string, std::string> mock_asr_manifest(const Manifest& manifest,
                                                     const std::vector<TrackAudio>& audio,
                                                     int max_utterance_s) {
  std::map<std::string, std::string> table;
  segmenter::EnergyVad vad;
  for (std::size_t ti = 0; ti < manifest.tracks.size(); ++ti) {
    const auto& spec = manifest.tracks[ti];
    if (spec.wav) continue;

    std::map<std::uint64_t, std::vector<std::string>> words_at;
    for (const auto& u : spec.utterances) {
      auto [first, last] = chunk_span(u);
      auto words = text::split_whitespace(u.text);
      const auto n = last - first;
      for (std::uint64_t j = 0; j < n; ++j) {
        auto from = j * words.size() / n;
        auto to = (j + 1) * words.size() / n;
        for (auto w = from; w < to; ++w) words_at[first + j].emplace_back(words[w]);
      }
    }

    segmenter::TrackBuffer buffer("replay", spec.track_id, max_utterance_s);
    auto record = [&](const segmenter::UtteranceAudio& u) {
      std::vector<std::string> words;
      for (auto c = static_cast<std::uint64_t>(u.start_time_s);
           c < static_cast<std::uint64_t>(u.end_time_s); ++c) {
        auto it = words_at.find(c);
        if (it != words_at.end()) words.insert(words.end(), it->second.begin(), it->second.end());
      }
      table[asr::content_hash(u.audio)] = text::join(words, " ");
    };
    const auto& chunks = audio[ti].chunks;
    for (std::uint64_t c = 0; c < chunks.size(); ++c) {
      audio::AudioChunk chunk{"replay", spec.track_id, c, chunks[c]};
      if (auto u = buffer.advance(chunk, vad.is_speech(chunk.samples))) record(*u);
    }
    if (auto u = buffer.flush()) record(*u);
  }
  return table;
}

doc::Components resolve_edit(const Action& action, const std::vector<doc::Line>& lines) {
  const auto total = doc::text_length(lines);
  if (action.edit == EditKind::kRaw) return action.components;

  std::optional<std::size_t> index;
  const auto& ref = action.line;
  if (ref.index) {
    if (*ref.index < lines.size()) index = *ref.index;
  } else {
    for (std::size_t i = 0; i < lines.size() && !index; ++i) {
      if ((ref.utt_seq && lines[i].attrs.utt_seq == ref.utt_seq) ||
          (ref.summary_id && lines[i].attrs.summary_id == ref.summary_id)) {
        index = i;
      }
    }
  }
  if (!index) throw ManifestError("edit at " + std::to_string(action.at_s) + " s: no such line");

  std::size_t offset = 0;
  for (std::size_t i = 0; i < *index; ++i) offset += code_points(lines[i].text) + 1;
  const auto& line = lines[*index];
  const auto len = code_points(line.text);
  const auto after = total - offset - len;

  doc::Components c;
  switch (action.edit) {
    case EditKind::kReplaceText:
      c = {doc::Component::retain(offset), doc::Component::erase(len),
           doc::Component::insert(action.text), doc::Component::retain(after)};
      break;
    case EditKind::kFindReplace: {
      auto at = line.text.find(action.find);
      if (at == std::string::npos) {
        throw ManifestError("edit at " + std::to_string(action.at_s) + " s: '" + action.find +
                            "' not found in line");
      }
      auto pre = code_points(std::string_view(line.text).substr(0, at));
      auto found = code_points(action.find);
      c = {doc::Component::retain(offset + pre), doc::Component::erase(found),
           doc::Component::insert(action.text), doc::Component::retain(total - offset - pre - found)};
      break;
    }
    case EditKind::kAppend:
      c = {doc::Component::retain(offset + len), doc::Component::insert(action.text),
           doc::Component::retain(after)};
      break;
    case EditKind::kDeleteLine:
      if (*index + 1 < lines.size()) {
        c = {doc::Component::retain(offset), doc::Component::erase(len + 1),
             doc::Component::retain(after - 1)};
      } else if (*index > 0) {
        c = {doc::Component::retain(offset - 1), doc::Component::erase(len + 1)};
      } else {
        c = {doc::Component::erase(len)};
      }
      break;
    case EditKind::kInsertLineAfter:
      c = {doc::Component::retain(offset + len), doc::Component::insert("\n" + action.text),
           doc::Component::retain(after)};
      break;
    case EditKind::kRaw:
      break;
  }
  return doc::normalize(c);
}

namespace {

class EventCollector {
 public:
  EventSink sink() {
    return [this](const Event& e) { lines_.push_back(e.format()); };
  }
  std::vector<std::string> take() { return std::move(lines_); }

 private:
  std::vector<std::string> lines_;
};

std::string with_newline(std::string s) {
  if (!s.empty()) s.push_back('\n');
  return s;
}

}  // namespace

Result run(const Manifest& manifest, const Options& options) {
  Manifest m = manifest;
  if (options.seed) m.seed = *options.seed;
  const auto tracks = render_tracks(m);
  const bool scripted = std::any_of(m.tracks.begin(), m.tracks.end(),
                                    [](const TrackSpec& t) { return !t.wav; });

  auto clock = std::make_shared<ManualClock>();
  EventCollector events;
  PipelineOptions popts = options.pipeline;
  popts.clock = clock;
  popts.on_event = events.sink();
  if (scripted && !popts.asr_backend) {
    auto table = mock_asr_manifest(m, tracks, popts.max_utterance_s);
    popts.asr_backend = std::make_shared<asr::MockAsr>(std::move(table));
  }
  Pipeline pipeline(std::move(popts));

  const auto info = pipeline.create_session(m.chunk_length_words);
  const auto& sid = info.session_id;
  for (const auto& t : m.tracks) {
    if (!t.speaker_label.empty()) pipeline.register_speaker(sid, t.track_id, t.speaker_label);
  }

  const std::size_t length = tracks.empty() ? 0 : tracks.front().chunks.size();
  const double debounce = pipeline.options().debounce_s;
  const auto wall_start = std::chrono::steady_clock::now();
  std::size_t next_action = 0;
  double last_activity = static_cast<double>(length);
  bool closed = false;

  for (std::uint64_t step = 0;; ++step) {
    const double t = static_cast<double>(step) * options.tick_s;
    if (options.mode == Mode::kRealtime) {
      std::this_thread::sleep_until(wall_start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                     std::chrono::duration<double>(t)));
    }
    clock->set(t);

    // Chunk k covers [k, k + 1) and is available once it has been recorded.
    const double whole = std::floor(t);
    if (whole == t && whole >= 1 && whole <= static_cast<double>(length)) {
      const auto seq = static_cast<std::uint64_t>(whole) - 1;
      for (const auto& track : tracks) {
        pipeline.ingest_chunk(sid, track.track_id, seq, audio::encode_pcm(track.chunks[seq]));
      }
      pipeline.drain();
    }
    if (!closed && t >= static_cast<double>(length)) {
      pipeline.close_session(sid);
      closed = true;
      pipeline.drain();
    }

    while (next_action < m.actions.size() && m.actions[next_action].at_s <= t) {
      const auto& action = m.actions[next_action++];
      last_activity = std::max(last_activity, t);
      auto editor = pipeline.session(sid);
      switch (action.kind) {
        case ActionKind::kEdit: {
          auto [lines, revision] = editor->inspect(
              [&](const doc::LineDoc& transcript, const doc::LineDoc& summary,
                  const orchestrator::SummaryOrchestrator&) {
                const auto& d = action.doc == "transcript" ? transcript : summary;
                return std::make_pair(d.lines(), d.revision());
              });
          doc::EditOp op{action.doc, action.base_revision.value_or(revision), action.author,
                         resolve_edit(action, lines)};
          try {
            pipeline.apply_edit(sid, op);
          } catch (const MalformedEditError& e) {
            throw ManifestError("edit at " + std::to_string(action.at_s) + " s: " + e.what());
          }
          break;
        }
        case ActionKind::kSummarize:
          pipeline.request_summary(sid, action.range);
          break;
        case ActionKind::kConfig:
          if (closed) {
            throw ManifestError("config at " + std::to_string(action.at_s) +
                                " s comes after the meeting ended");
          }
          pipeline.set_chunk_length(sid, action.chunk_length_words);
          break;
        case ActionKind::kDebug:
          pipeline.set_debug(sid, action.debug);
          break;
      }
      pipeline.drain();
    }

    pipeline.tick();
    pipeline.drain();

    if (closed && next_action == m.actions.size() && pipeline.quiescent(sid) &&
        t >= last_activity + 2 * debounce) {
      break;
    }
    if (t > last_activity + 3600) {
      throw Error("replay did not settle within an hour of virtual time");
    }
  }

  Result result;
  result.session_id = sid;
  auto editor = pipeline.session(sid);
  result.transcript = with_newline(editor->text(editor::kTranscriptDoc));
  result.minutes = with_newline(editor->text(editor::kSummaryDoc));
  result.events = events.take();
  return result;
}

void write_outputs(const Result& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const char* name, const std::string& content) {
    std::ofstream out(out_dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (out_dir / name).string());
    out << content;
  };
  write("transcript.txt", result.transcript);
  write("minutes.txt", result.minutes);
  std::string log;
  for (const auto& line : result.events) log += line + "\n";
  write("events.log", log);
}

}  // namespace minuteman::replay
