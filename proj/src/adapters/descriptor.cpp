#include "vigil/adapters/descriptor.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>

#include "vigil/core/errors.hpp"

namespace vigil::adapters {

namespace {

constexpr std::string_view kKnownPlaceholders[] = {"{input_file}", "{workdir}", "{image}"};

std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + needle.size())) ++n;
    return n;
}

[[noreturn]] void fail(std::string_view field, const std::string& why) {
    throw DescriptorError("field '" + std::string(field) + "': " + why);
}

const Json& require(const Json& j, std::string_view field) {
    const auto it = j.find(std::string(field));
    if (it == j.end()) fail(field, "missing");
    return *it;
}

}  // namespace

std::string_view to_string(Level l) { return l == Level::bytecode ? "bytecode" : "solidity"; }

std::string_view to_string(ParserKind p) {
    switch (p) {
        case ParserKind::raw_text: return "raw_text";
        case ParserKind::json_passthrough: return "json_passthrough";
        case ParserKind::line_findings: return "line_findings";
    }
    return "raw_text";
}

void ToolDescriptor::validate() const {
    static const std::regex kName("^[A-Za-z0-9][A-Za-z0-9._-]*$");
    if (!std::regex_match(name, kName)) fail("name", "must match [A-Za-z0-9][A-Za-z0-9._-]*, got '" + name + "'");
    if (name == "builtin") fail("name", "'builtin' is reserved for the built-in detectors");
    if (level.empty()) fail("level", "must name at least one of bytecode, solidity");
    if (!(timeout.count() > 0)) fail("timeout", "must be positive");
    if (command_template.empty()) fail("command_template", "must not be empty");
    std::size_t inputs = 0;
    static const std::regex kPlaceholder(R"(\{[A-Za-z_]+\})");
    for (const auto& tok : command_template) {
        inputs += count_occurrences(tok, "{input_file}");
        for (auto it = std::sregex_iterator(tok.begin(), tok.end(), kPlaceholder); it != std::sregex_iterator(); ++it) {
            const auto ph = it->str();
            if (std::find(std::begin(kKnownPlaceholders), std::end(kKnownPlaceholders), ph) == std::end(kKnownPlaceholders))
                fail("command_template", "unknown placeholder " + ph);
        }
    }
    if (inputs != 1)
        fail("command_template", "must contain {input_file} exactly once, found " + std::to_string(inputs));
}

ToolDescriptor descriptor_from_json(const Json& j) {
    if (!j.is_object()) throw DescriptorError("descriptor must be a JSON object");
    ToolDescriptor d;

    const auto& name = require(j, "name");
    if (!name.is_string()) fail("name", "must be a string");
    d.name = name.get<std::string>();

    const auto& level = require(j, "level");
    const auto add_level = [&](const Json& v) {
        if (!v.is_string()) fail("level", "entries must be strings");
        const auto s = v.get<std::string>();
        if (s == "bytecode") d.level.bytecode = true;
        else if (s == "solidity") d.level.solidity = true;
        else fail("level", "unknown level '" + s + "'");
    };
    if (level.is_array()) {
        for (const auto& v : level) add_level(v);
    } else {
        add_level(level);
    }

    if (const auto it = j.find("image"); it != j.end()) {
        if (!it->is_string()) fail("image", "must be a string");
        d.image = it->get<std::string>();
    }

    const auto& tmpl = require(j, "command_template");
    if (!tmpl.is_array()) fail("command_template", "must be an array of strings");
    for (const auto& t : tmpl) {
        if (!t.is_string()) fail("command_template", "must be an array of strings");
        d.command_template.push_back(t.get<std::string>());
    }

    const auto& timeout = require(j, "timeout");
    if (!timeout.is_number()) fail("timeout", "must be a number of seconds");
    d.timeout = Seconds{timeout.get<double>()};

    if (const auto it = j.find("parser"); it != j.end()) {
        const auto p = it->is_string() ? it->get<std::string>() : std::string();
        if (p == "raw_text") d.parser = ParserKind::raw_text;
        else if (p == "json_passthrough") d.parser = ParserKind::json_passthrough;
        else if (p == "line_findings") d.parser = ParserKind::line_findings;
        else fail("parser", "must be one of raw_text, json_passthrough, line_findings");
    }

    if (const auto it = j.find("enabled"); it != j.end()) {
        if (!it->is_boolean()) fail("enabled", "must be a boolean");
        d.enabled = it->get<bool>();
    }

    if (const auto it = j.find("metadata"); it != j.end()) {
        if (!it->is_object()) fail("metadata", "must be an object");
        for (const auto& [k, v] : it->items()) d.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }

    d.validate();
    return d;
}

Json to_json(const ToolDescriptor& d) {
    Json level = Json::array();
    if (d.level.bytecode) level.push_back("bytecode");
    if (d.level.solidity) level.push_back("solidity");
    return Json{{"name", d.name},
                {"level", level},
                {"image", d.image},
                {"command_template", d.command_template},
                {"timeout", d.timeout.count()},
                {"parser", to_string(d.parser)},
                {"enabled", d.enabled},
                {"metadata", d.metadata}};
}

DescriptorLoad load_descriptors(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    DescriptorLoad out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return out;

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir, ec))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::set<std::string> names;
    for (const auto& file : files) {
        try {
            std::ifstream in(file);
            if (!in) throw DescriptorError("cannot open file");
            const auto j = Json::parse(in);
            auto d = descriptor_from_json(j);
            if (!names.insert(d.name).second) throw DescriptorError("field 'name': duplicate tool name '" + d.name + "'");
            out.descriptors.push_back(std::move(d));
        } catch (const Json::exception& e) {
            out.errors.emplace_back(file, std::string("invalid JSON: ") + e.what());
        } catch (const DescriptorError& e) {
            out.errors.emplace_back(file, e.what());
        }
    }
    std::sort(out.descriptors.begin(), out.descriptors.end(),
              [](const ToolDescriptor& a, const ToolDescriptor& b) { return a.name < b.name; });
    return out;
}

}  // namespace vigil::adapters
