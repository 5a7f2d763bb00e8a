#include "gea/persistence.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "gea/errors.hpp"
#include "gea/json_codec.hpp"

namespace gea {

namespace {

struct Line {
    std::size_t number;
    std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 1;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        if (nl == std::string_view::npos) {
            throw ParseError(number, "truncated line (missing newline)");
        }
        lines.push_back({number++, text.substr(0, nl)});
        text.remove_prefix(nl + 1);
    }
    return lines;
}

Json parse_line(const Line& line) {
    try {
        return Json::parse(line.text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line.number, std::string("malformed record: ") + e.what());
    }
}

/// Runs `fn` and re-raises decoding failures as ParseError on `line`.
template <typename Fn>
auto at_line(std::size_t line, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError&) {
        throw;
    } catch (const VersionError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(line, e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(line, e.what());
    }
}

/// Validates line 1 and returns the header object.
Json read_header(const std::vector<Line>& lines, std::string_view kind) {
    if (lines.empty()) throw ParseError(1, "missing header");
    Json header = parse_line(lines.front());
    if (!header.is_object()) throw ParseError(1, "header must be an object");
    auto version = header.find("format_version");
    if (version == header.end() || !version->is_number_integer()) {
        throw ParseError(1, "header lacks format_version");
    }
    if (version->get<int>() != kFormatVersion) {
        throw VersionError("unsupported format_version " + std::to_string(version->get<int>()) +
                           " (this build reads " + std::to_string(kFormatVersion) + ")");
    }
    auto found = header.find("kind");
    if (found == header.end() || !found->is_string() || found->get<std::string>() != kind) {
        throw ParseError(1, "expected a " + std::string(kind) + " file");
    }
    return header;
}

std::string dump_line(const Json& j) { return j.dump() + "\n"; }

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string encode_archive(const Archive& archive) {
    std::string out = dump_line(Json{{"format_version", kFormatVersion},
                                     {"kind", "archive"},
                                     {"D", archive.dimension()},
                                     {"run_seed", archive.run_seed()}});
    for (const auto& record : archive.records()) out += dump_line(to_json_value(record));
    return out;
}

Archive decode_archive(std::string_view text) {
    const auto lines = split_lines(text);
    const Json header = read_header(lines, "archive");
    Archive archive = at_line(1, [&] {
        ObjectReader r(header, "header");
        r.required("format_version");
        r.required("kind");
        Archive a(r.get<std::size_t>("D"), r.get<std::uint64_t>("run_seed"));
        r.finish();
        return a;
    });
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Json j = parse_line(lines[i]);
        at_line(lines[i].number, [&] {
            archive.insert(agent_from_json(j, "record"));
            return 0;
        });
    }
    return archive;
}

void save_archive(const Archive& archive, const std::filesystem::path& path) {
    write_file_atomic(path, encode_archive(archive));
}

Archive load_archive(const std::filesystem::path& path) { return decode_archive(read_file(path)); }

std::string encode_world(const SimWorld& world) {
    Json header = world_header(world);
    header["format_version"] = kFormatVersion;
    header["kind"] = "world";
    std::string out = dump_line(header);
    for (const auto& task : world.tasks) out += dump_line(to_json_value(task));
    return out;
}

SimWorld decode_world(std::string_view text) {
    const auto lines = split_lines(text);
    Json header = read_header(lines, "world");
    header.erase("format_version");
    header.erase("kind");
    header["tasks"] = Json::array();
    for (std::size_t i = 1; i < lines.size(); ++i) header["tasks"].push_back(parse_line(lines[i]));
    // Re-decode task by task so errors carry the right line.
    for (std::size_t i = 1; i < lines.size(); ++i) {
        at_line(lines[i].number, [&] { return task_from_json(header["tasks"][i - 1], "task"); });
        if (header["tasks"][i - 1].value("index", std::size_t{0}) != i - 1) {
            throw ParseError(lines[i].number, "task index out of order");
        }
    }
    return at_line(1, [&] { return world_from_json(header, "world"); });
}

void save_world(const SimWorld& world, const std::filesystem::path& path) {
    write_file_atomic(path, encode_world(world));
}

SimWorld load_world(const std::filesystem::path& path) { return decode_world(read_file(path)); }

std::string encode_transcript(const RunTranscript& transcript) {
    Json initial = Json::array();
    for (const auto& r : transcript.initial) initial.push_back(to_json_value(r));
    Json header{{"format_version", kFormatVersion},
                {"kind", "transcript"},
                {"config", to_json_value(transcript.config)},
                {"world", world_to_json(transcript.world)},
                {"initial", initial}};
    header["injection"] =
        transcript.injection ? to_json_value(*transcript.injection) : Json(nullptr);
    std::string out = dump_line(header);
    for (const auto& it : transcript.iterations) out += dump_line(to_json_value(it));
    return out;
}

RunTranscript decode_transcript(std::string_view text) {
    const auto lines = split_lines(text);
    const Json header = read_header(lines, "transcript");
    RunTranscript transcript = at_line(1, [&] {
        ObjectReader r(header, "header");
        r.required("format_version");
        r.required("kind");
        RunTranscript t;
        t.config = run_config_from_json(r.required("config"), RunConfig{}, "config");
        t.world = world_from_json(r.required("world"), "world");
        const Json& initial = r.required("initial");
        if (!initial.is_array()) throw ConfigError("initial", "initial must be an array");
        for (std::size_t i = 0; i < initial.size(); ++i) {
            t.initial.push_back(agent_from_json(initial[i], "initial[" + std::to_string(i) + "]"));
        }
        const Json& injection = r.required("injection");
        if (!injection.is_null()) t.injection = injection_from_json(injection, "injection");
        r.finish();
        return t;
    });
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Json j = parse_line(lines[i]);
        transcript.iterations.push_back(
            at_line(lines[i].number, [&] { return iteration_from_json(j, "iteration"); }));
    }
    return transcript;
}

void save_transcript(const RunTranscript& transcript, const std::filesystem::path& path) {
    write_file_atomic(path, encode_transcript(transcript));
}

RunTranscript load_transcript(const std::filesystem::path& path) {
    return decode_transcript(read_file(path));
}

}  // namespace gea
