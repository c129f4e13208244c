#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "minuteman/audio.hpp"
#include "minuteman/errors.hpp"
#include "minuteman/replay.hpp"
#include "minuteman/segmenter.hpp"
#include "minuteman/summarizer_client.hpp"
#include "minuteman/transcript_doc.hpp"
#include "minuteman/wire.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace minuteman;

namespace {

// Documents and edits cross the boundary as JSON text; the Python package
// converts them to and from plain lists and dicts.

json line_json(const doc::Line& line) {
  json j{{"text", line.text}, {"attrs", wire::to_json(line.attrs)}, {"author", line.author}};
  if (!line.stamps.empty()) {
    json stamps = json::array();
    for (const auto& s : line.stamps) stamps.push_back(wire::to_json(s));
    j["stamps"] = std::move(stamps);
  }
  return j;
}

std::vector<doc::Line> lines_from(const std::string& text) {
  auto j = json::parse(text);
  if (!j.is_array()) throw ValidationError("lines must be a list");
  std::vector<doc::Line> lines;
  for (const auto& item : j) {
    doc::Line line;
    line.text = item.at("text").get<std::string>();
    if (auto a = item.find("attrs"); a != item.end()) line.attrs = wire::attrs_from_json(*a);
    if (auto a = item.find("author"); a != item.end()) line.author = a->get<std::string>();
    if (auto s = item.find("stamps"); s != item.end()) {
      for (const auto& stamp : *s) line.stamps.push_back(wire::attrs_from_json(stamp));
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

doc::Components components_from(const std::string& text) {
  return wire::components_from_json(json::parse(text));
}

std::string lines_to(const std::vector<doc::Line>& lines) {
  json out = json::array();
  for (const auto& l : lines) out.push_back(line_json(l));
  return out.dump();
}

std::vector<std::int16_t> samples_from(const py::bytes& data) {
  return audio::decode_pcm(std::string(data));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Minuteman core: transcript documents, segmentation, summarization and replay.";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<NotFoundError>(m, "NotFoundError", error.ptr());
  py::register_exception<FormatError>(m, "FormatError", error.ptr());
  py::register_exception<SequencingError>(m, "SequencingError", error.ptr());
  py::register_exception<MalformedEditError>(m, "MalformedEditError", error.ptr());

  m.attr("SAMPLE_RATE") = audio::kSampleRate;
  m.attr("CHUNK_SAMPLES") = audio::kChunkSamples;

  m.def("word_count", [](const std::string& text) { return doc::word_count(text); });

  m.def("extract_segment_json",
        [](const std::string& lines, std::uint64_t start_seq, std::uint64_t end_seq) {
          auto segment = doc::extract_segment(lines_from(lines), {start_seq, end_seq});
          return py::make_tuple(segment.text, segment.line_indices);
        });

  m.def("transform_json", [](const std::string& a, const std::string& b) {
    auto [a2, b2] = doc::transform(components_from(a), components_from(b));
    return py::make_tuple(wire::to_json(a2).dump(), wire::to_json(b2).dump());
  });

  m.def("apply_json", [](const std::string& lines, const std::string& components,
                         const std::string& author) {
    auto outcome = doc::apply(lines_from(lines), components_from(components), author);
    json modified = json::array();
    for (const auto& a : outcome.modified) modified.push_back(wire::to_json(a));
    return py::make_tuple(lines_to(outcome.lines), modified.dump());
  });

  m.def("stamp_user_inserts_json", [](const std::string& lines, const std::string& components) {
    return wire::to_json(doc::stamp_user_inserts(lines_from(lines), components_from(components))).dump();
  });

  m.def("rms_dbfs", [](const py::bytes& pcm) { return audio::rms_dbfs(samples_from(pcm)); });

  m.def(
      "detect_speech",
      [](const py::bytes& pcm, double threshold_dbfs) {
        return segmenter::detect_speech(samples_from(pcm), threshold_dbfs);
      },
      py::arg("pcm"), py::arg("threshold_dbfs") = segmenter::kDefaultThresholdDbfs);

  m.def(
      "segment",
      [](const std::map<std::string, std::vector<py::bytes>>& tracks, double threshold_dbfs,
         int max_utterance_s) {
        segmenter::SessionSegmenter seg("py", std::make_shared<segmenter::EnergyVad>(threshold_dbfs),
                                        max_utterance_s);
        std::vector<segmenter::UtteranceAudio> out;
        std::size_t longest = 0;
        for (const auto& [id, chunks] : tracks) longest = std::max(longest, chunks.size());
        for (std::size_t i = 0; i < longest; ++i) {
          for (const auto& [id, chunks] : tracks) {
            if (i >= chunks.size()) continue;
            audio::AudioChunk chunk{"py", id, i, audio::decode_chunk_payload(std::string(chunks[i]))};
            for (auto& u : seg.process(chunk)) out.push_back(std::move(u));
          }
        }
        for (auto& u : seg.finish()) out.push_back(std::move(u));
        py::list result;
        for (const auto& u : out) {
          py::dict d;
          d["track_id"] = u.track_id;
          d["start_time_s"] = u.start_time_s;
          d["end_time_s"] = u.end_time_s;
          d["finalize_seq"] = u.finalize_seq;
          d["audio"] = py::bytes(audio::encode_pcm(u.audio));
          result.append(d);
        }
        return result;
      },
      py::arg("tracks"), py::arg("threshold_dbfs") = segmenter::kDefaultThresholdDbfs,
      py::arg("max_utterance_s") = segmenter::kDefaultMaxUtteranceSeconds);

  m.def(
      "preprocess",
      [](const std::string& text, bool remove_stopwords) {
        auto config = summarizer::PreprocessConfig::defaults();
        config.remove_stopwords = remove_stopwords;
        return summarizer::preprocess(text, config);
      },
      py::arg("text"), py::arg("remove_stopwords") = true);

  m.def("mock_summarize", [](const std::string& cleaned) { return summarizer::mock_summarize(cleaned); });

  m.def(
      "replay",
      [](const std::string& manifest_yaml, const std::string& base_dir, std::optional<std::uint64_t> seed,
         std::optional<double> debounce_s, bool realtime) {
        auto manifest = replay::parse_manifest(manifest_yaml, base_dir);
        replay::Options options;
        options.seed = seed;
        if (debounce_s) options.pipeline.debounce_s = *debounce_s;
        options.mode = realtime ? replay::Mode::kRealtime : replay::Mode::kFast;
        replay::Result result;
        {
          py::gil_scoped_release release;
          result = replay::run(manifest, options);
        }
        py::dict d;
        d["session_id"] = result.session_id;
        d["transcript"] = result.transcript;
        d["minutes"] = result.minutes;
        d["events"] = result.events;
        return d;
      },
      py::arg("manifest_yaml"), py::arg("base_dir") = "", py::arg("seed") = py::none(),
      py::arg("debounce_s") = py::none(), py::arg("realtime") = false);
}
