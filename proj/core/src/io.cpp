#include "psys/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace psys {

namespace {

std::optional<std::uint64_t> parse_uint(const std::string& tok) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
    return value;
}

NodeId parse_node(const std::string& tok, std::uint32_t line) {
    auto v = parse_uint(tok);
    if (!v || *v == 0 || *v > 0xffffffffull)
        throw ParseError(line, "bad node id '" + tok + "'");
    return static_cast<NodeId>(*v);
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) toks.push_back(tok);
    return toks;
}

std::vector<std::string> split_char(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace

Topology parse_topology(const std::string& text) {
    std::optional<TopologyKind> kind;
    std::optional<NodeId> nodes;
    bool siblings = false;
    std::vector<Arc> arcs;
    std::vector<std::uint32_t> arc_lines;

    std::istringstream in(text);
    std::string raw;
    std::uint32_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
        auto toks = split_ws(raw);
        if (toks.empty()) continue;
        const std::string& head = toks[0];
        if (head == "kind:") {
            if (kind) throw ParseError(lineno, "duplicate kind: line");
            if (toks.size() != 2) throw ParseError(lineno, "kind: takes one value");
            try {
                kind = topology_kind_from_string(toks[1]);
            } catch (const ValidationError& e) {
                throw ParseError(lineno, e.what());
            }
        } else if (head == "nodes:") {
            if (nodes) throw ParseError(lineno, "duplicate nodes: line");
            if (toks.size() != 2) throw ParseError(lineno, "nodes: takes one value");
            nodes = parse_node(toks[1], lineno);
        } else if (head == "siblings:") {
            if (toks.size() != 2 || (toks[1] != "true" && toks[1] != "false"))
                throw ParseError(lineno, "siblings: must be true or false");
            siblings = toks[1] == "true";
        } else if (head == "arc:") {
            if (toks.size() != 3) throw ParseError(lineno, "arc: takes two node ids");
            arcs.push_back({parse_node(toks[1], lineno), parse_node(toks[2], lineno)});
            arc_lines.push_back(lineno);
        } else {
            throw ParseError(lineno, "unknown directive '" + head + "'");
        }
    }
    if (!kind) throw ParseError(lineno, "missing kind: line");
    if (!nodes) throw ParseError(lineno, "missing nodes: line");
    try {
        return Topology::build(*kind, *nodes, std::move(arcs), siblings);
    } catch (const ValidationError& e) {
        throw ParseError(lineno, e.what());
    }
}

std::string serialize_topology(const Topology& topology) {
    std::string out = "kind: " + to_string(topology.kind()) + "\n";
    out += "nodes: " + std::to_string(topology.node_count()) + "\n";
    if (topology.kind() == TopologyKind::dag)
        out += std::string("siblings: ") + (topology.include_siblings() ? "true" : "false") + "\n";
    if (topology.kind() == TopologyKind::graph) {
        // Stored arcs are the symmetric closure; emit each edge once.
        for (const Arc& a : topology.arcs())
            if (a.from < a.to)
                out += "arc: " + std::to_string(a.from) + " " + std::to_string(a.to) + "\n";
    } else {
        for (const Arc& a : topology.arcs())
            out += "arc: " + std::to_string(a.from) + " " + std::to_string(a.to) + "\n";
    }
    return out;
}

InstanceSpec parse_instance_spec(const std::string& text) {
    InstanceSpec spec;
    bool have_topology = false, have_commander = false, have_squad = false, have_variant = false;

    std::istringstream in(text);
    std::string raw;
    std::uint32_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
        std::string line = trim(raw);
        if (line.empty()) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError(lineno, "expected 'key: value'");
        std::string key = trim(line.substr(0, colon));
        std::string value = trim(line.substr(colon + 1));
        if (value.empty()) throw ParseError(lineno, "missing value for '" + key + ":'");
        if (key == "topology") {
            if (have_topology) throw ParseError(lineno, "duplicate topology: line");
            have_topology = true;
            spec.topology_path = value;
        } else if (key == "commander") {
            if (have_commander) throw ParseError(lineno, "duplicate commander: line");
            have_commander = true;
            spec.commander = parse_node(value, lineno);
        } else if (key == "squad") {
            if (have_squad) throw ParseError(lineno, "duplicate squad: line");
            have_squad = true;
            for (const std::string& part : split_char(value, ',')) {
                std::string tok = trim(part);
                if (tok.empty()) throw ParseError(lineno, "empty squad entry");
                spec.squad.push_back(parse_node(tok, lineno));
            }
        } else if (key == "variant") {
            if (have_variant) throw ParseError(lineno, "duplicate variant: line");
            have_variant = true;
            try {
                spec.variant = variant_from_string(value);
            } catch (const ValidationError& e) {
                throw ParseError(lineno, e.what());
            }
        } else {
            throw ParseError(lineno, "unknown key '" + key + ":'");
        }
    }
    if (!have_topology) throw ParseError(lineno, "missing topology: line");
    if (!have_commander) throw ParseError(lineno, "missing commander: line");
    if (!have_squad) throw ParseError(lineno, "missing squad: line");
    if (!have_variant) throw ParseError(lineno, "missing variant: line");
    return spec;
}

std::string serialize_instance_spec(const InstanceSpec& spec) {
    std::string out = "topology: " + spec.topology_path + "\n";
    out += "commander: " + std::to_string(spec.commander) + "\n";
    out += "squad: ";
    for (std::size_t i = 0; i < spec.squad.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(spec.squad[i]);
    }
    out += "\n";
    out += "variant: " + to_string(spec.variant) + "\n";
    return out;
}

LoadedInstance load_instance_file(const std::filesystem::path& path) {
    InstanceSpec spec = parse_instance_spec(read_file(path));
    std::filesystem::path topo_path = spec.topology_path;
    if (topo_path.is_relative()) topo_path = path.parent_path() / topo_path;
    Topology topology = parse_topology(read_file(topo_path));
    return LoadedInstance{std::move(spec), std::move(topology)};
}

std::string trace_to_tsv(const Trace& trace, const RuleProgram& program,
                         const std::vector<NodeId>& column_order,
                         const std::vector<std::string>& labels) {
    std::string out = "step";
    for (const std::string& label : labels) out += "\t" + label;
    out += "\n";
    for (std::size_t row = 0; row < trace.row_count(); ++row) {
        out += std::to_string(row);
        for (NodeId cell : column_order) {
            const Cell& c = trace.rows[row][cell];
            out += "\t" + program.render_cell(c.state, c.content);
        }
        out += "\n";
    }
    return out;
}

Trace trace_from_tsv(const std::string& text, const RuleProgram& program,
                     const std::vector<NodeId>& column_order,
                     const std::vector<std::string>& labels) {
    std::istringstream in(text);
    std::string line;
    std::uint32_t lineno = 0;

    if (!std::getline(in, line)) throw ParseError(1, "empty trace file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_char(line, '\t');
    if (header.empty() || header[0] != "step")
        throw ParseError(lineno, "trace header must start with 'step'");
    if (header.size() != labels.size() + 1)
        throw ParseError(lineno, "trace has " + std::to_string(header.size() - 1) +
                                     " cell columns, instance expects " +
                                     std::to_string(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (header[i + 1] != labels[i])
            throw ParseError(lineno, "trace column '" + header[i + 1] +
                                         "' does not match instance cell '" + labels[i] + "'");

    NodeId max_node = 0;
    for (NodeId x : column_order) max_node = std::max(max_node, x);

    Trace trace;
    std::uint64_t expected_step = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_char(line, '\t');
        if (fields.size() != column_order.size() + 1)
            throw ParseError(lineno, "row has " + std::to_string(fields.size() - 1) +
                                         " cells, expected " +
                                         std::to_string(column_order.size()));
        auto step_val = parse_uint(fields[0]);
        if (!step_val || *step_val != expected_step)
            throw ParseError(lineno, "expected step " + std::to_string(expected_step) +
                                         ", found '" + fields[0] + "'");
        ++expected_step;

        std::vector<Cell> row(static_cast<std::size_t>(max_node) + 1);
        for (std::size_t i = 0; i < column_order.size(); ++i) {
            auto toks = split_ws(fields[i + 1]);
            if (toks.empty()) throw ParseError(lineno, "empty cell field");
            auto state = program.find_state(toks[0]);
            if (!state) throw ParseError(lineno, "unknown state '" + toks[0] + "'");
            Cell cell;
            cell.state = *state;
            for (std::size_t t = 1; t < toks.size(); ++t) {
                std::string name = toks[t];
                Count count = 1;
                if (auto caret = name.find('^'); caret != std::string::npos) {
                    auto v = parse_uint(name.substr(caret + 1));
                    if (!v || *v < 2)
                        throw ParseError(lineno, "bad count in '" + name + "'");
                    count = *v;
                    name.erase(caret);
                }
                auto sym = program.find_symbol(name);
                if (!sym) throw ParseError(lineno, "unknown symbol '" + name + "'");
                if (cell.content.count(*sym) > 0)
                    throw ParseError(lineno, "symbol '" + name + "' repeated in cell field");
                cell.content.add(*sym, count);
            }
            row[column_order[i]] = std::move(cell);
        }
        trace.rows.push_back(std::move(row));
    }
    if (trace.rows.empty()) throw ParseError(lineno, "trace has no rows");
    return trace;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << content;
}

}  // namespace psys
