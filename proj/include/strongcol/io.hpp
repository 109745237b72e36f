#pragma once

#include <strongcol/coloring.hpp>
#include <strongcol/errors.hpp>
#include <strongcol/graph.hpp>
#include <strongcol/partition.hpp>
#include <strongcol/transversal.hpp>

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace strongcol::io {

using nlohmann::json;

// Graph text format: a header line "n <count>" followed by one "u v" line per
// edge, 0-indexed, u < v, sorted lexicographically. Blank lines and lines
// starting with '#' are ignored on input.

inline std::string to_edge_list(const Graph & g)
{
    std::ostringstream out;
    out << "n " << g.size() << '\n';
    for (auto [u, v] : g.edges())
        out << u << ' ' << v << '\n';
    return out.str();
}

inline Graph from_edge_list(const std::string & text)
{
    std::istringstream in(text);
    std::string line;
    std::optional<Graph> g;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream fields(line);
        if (! g) {
            std::string tag;
            long long n = -1;
            if (! (fields >> tag >> n) || tag != "n" || n < 0)
                throw FormatError("line " + std::to_string(lineno) + ": expected header 'n <count>'");
            g.emplace(static_cast<std::size_t>(n));
            continue;
        }
        long long u = -1, v = -1;
        std::string extra;
        if (! (fields >> u >> v) || (fields >> extra))
            throw FormatError("line " + std::to_string(lineno) + ": expected 'u v'");
        if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= g->size() || static_cast<std::size_t>(v) >= g->size())
            throw FormatError("line " + std::to_string(lineno) + ": vertex out of range");
        if (u == v)
            throw FormatError("line " + std::to_string(lineno) + ": self-loop");
        g->add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    if (! g)
        throw FormatError("missing header 'n <count>'");
    return std::move(*g);
}

inline json to_json(const Graph & g)
{
    json edges = json::array();
    for (auto [u, v] : g.edges())
        edges.push_back({u, v});
    return {{"n", g.size()}, {"edges", std::move(edges)}};
}

inline Graph graph_from_json(const json & j)
{
    try {
        Graph g(j.at("n").get<std::size_t>());
        for (const auto & e : j.at("edges")) {
            if (! e.is_array() || e.size() != 2)
                throw FormatError("edge entries must be [u, v]");
            auto u = e[0].get<std::size_t>();
            auto v = e[1].get<std::size_t>();
            if (u >= g.size() || v >= g.size() || u == v)
                throw FormatError("invalid edge [" + std::to_string(u) + ", " + std::to_string(v) + "]");
            g.add_edge(u, v);
        }
        return g;
    }
    catch (const json::exception & e) {
        throw FormatError(std::string("graph json: ") + e.what());
    }
}

inline json to_json(const VertexPartition & p) { return {{"k", p.k}, {"parts", p.parts}}; }

inline VertexPartition partition_from_json(const json & j)
{
    try {
        VertexPartition p;
        p.k = j.value("k", std::size_t{0});
        p.parts = j.at("parts").get<std::vector<Part>>();
        return p;
    }
    catch (const json::exception & e) {
        throw FormatError(std::string("partition json: ") + e.what());
    }
}

inline json to_json(const Transversal & t)
{
    json choice = json::object();
    for (std::size_t i = 0; i < t.choice.size(); ++i)
        if (t.choice[i])
            choice[std::to_string(i)] = *t.choice[i];
    return {{"choice", std::move(choice)}};
}

/// `parts` sizes the result; entries absent from the file stay empty.
inline Transversal transversal_from_json(const json & j, std::size_t parts)
{
    try {
        Transversal t(parts);
        for (const auto & [key, value] : j.at("choice").items()) {
            std::size_t idx = std::stoul(key);
            if (idx >= parts)
                throw FormatError("transversal part index " + key + " out of range");
            t.choice[idx] = value.get<Vertex>();
        }
        return t;
    }
    catch (const json::exception & e) {
        throw FormatError(std::string("transversal json: ") + e.what());
    }
    catch (const std::logic_error & e) {
        throw FormatError(std::string("transversal json: ") + e.what());
    }
}

inline json to_json(const ColoringCertificate & c) { return {{"k", c.k}, {"colors", c.colors}}; }

inline ColoringCertificate certificate_from_json(const json & j)
{
    try {
        return {j.at("k").get<std::size_t>(), j.at("colors").get<std::vector<std::size_t>>()};
    }
    catch (const json::exception & e) {
        throw FormatError(std::string("certificate json: ") + e.what());
    }
}

inline std::string read_text(const std::filesystem::path & path)
{
    std::ifstream in(path, std::ios::binary);
    if (! in)
        throw FormatError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text(const std::filesystem::path & path, const std::string & text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (! out)
        throw FormatError("cannot write " + path.string());
    out << text;
    if (! out)
        throw FormatError("failed writing " + path.string());
}

inline json parse_json(const std::string & text, const std::string & what)
{
    try {
        return json::parse(text);
    }
    catch (const json::exception & e) {
        throw FormatError(what + ": " + e.what());
    }
}

/// Canonical compact serialization used for every JSON file we write.
inline std::string dump(const json & j) { return j.dump() + "\n"; }

inline bool is_json_path(const std::filesystem::path & path) { return path.extension() == ".json"; }

inline Graph read_graph(const std::filesystem::path & path)
{
    auto text = read_text(path);
    if (is_json_path(path))
        return graph_from_json(parse_json(text, path.string()));
    return from_edge_list(text);
}

inline void write_graph(const std::filesystem::path & path, const Graph & g)
{
    write_text(path, is_json_path(path) ? dump(to_json(g)) : to_edge_list(g));
}

inline VertexPartition read_partition(const std::filesystem::path & path)
{
    return partition_from_json(parse_json(read_text(path), path.string()));
}

} // namespace strongcol::io
