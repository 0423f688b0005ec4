#pragma once

// JSON encodings of task queries, states and steps. States and queries use
// the task text renderings; integers that may exceed 64 bits are strings.

#include <string>

#include <json.hpp>

#include "reflab/error.hpp"
#include "reflab/tasks/mult.hpp"
#include "reflab/tasks/sudoku.hpp"

namespace reflab {

using json = nlohmann::ordered_json;

template <class T>
struct Codec;

namespace detail {

inline const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline json wide_list(const std::vector<Wide>& v) {
    json a = json::array();
    for (Wide w : v) a.push_back(to_string(w));
    return a;
}

inline std::vector<Wide> parse_wide_list(const json& a) {
    std::vector<Wide> v;
    for (const auto& e : a) v.push_back(parse_wide(e.get<std::string>()));
    return v;
}

}  // namespace detail

template <>
struct Codec<MultTask> {
    static json query(const MultQuery& q) { return render(q); }
    static MultQuery parse_query(const json& j) { return parse_mult_query(j.get<std::string>()); }
    static json state(const MultState& s) { return render(s); }
    static MultState parse_state(const json& j) { return parse_mult_state(j.get<std::string>()); }

    static json step(const MultStep& r) {
        if (r.is_answer) return {{"answer", to_string(r.answer)}};
        return {{"side", std::string(to_string(r.side))},
                {"digit", r.digit},
                {"positions", r.positions},
                {"delta", to_string(r.delta)},
                {"contributions", detail::wide_list(r.contributions)},
                {"partial_sums", detail::wide_list(r.partial_sums)},
                {"next", render(r.next)}};
    }

    static MultStep parse_step(const json& j) {
        MultStep r;
        if (j.is_object() && j.contains("answer")) {
            r.is_answer = true;
            r.answer = parse_wide(j.at("answer").get<std::string>());
            return r;
        }
        const auto side = detail::require(j, "side").get<std::string>();
        if (side != "x" && side != "y") throw InputError("side must be x or y");
        r.side = side == "x" ? Side::x : Side::y;
        r.digit = detail::require(j, "digit").get<int>();
        r.positions = detail::require(j, "positions").get<std::vector<int>>();
        r.delta = parse_wide(detail::require(j, "delta").get<std::string>());
        r.contributions = detail::parse_wide_list(detail::require(j, "contributions"));
        r.partial_sums = detail::parse_wide_list(detail::require(j, "partial_sums"));
        r.next = parse_mult_state(detail::require(j, "next").get<std::string>());
        return r;
    }
};

template <>
struct Codec<SudokuTask> {
    static json query(const SudokuQuery& q) { return render(q); }
    static SudokuQuery parse_query(const json& j) { return {parse_sudoku_board(j.get<std::string>())}; }
    static json state(const SudokuBoard& b) { return render(b); }
    static SudokuBoard parse_state(const json& j) { return parse_sudoku_board(j.get<std::string>()); }

    static json step(const SudokuStep& r) {
        json fills = json::array();
        for (const auto& f : r.fills) fills.push_back({f.row, f.col, f.value});
        return {{"fills", std::move(fills)}, {"guess", r.guess}, {"next", render(r.next)}};
    }

    static SudokuStep parse_step(const json& j) {
        SudokuStep r;
        for (const auto& f : detail::require(j, "fills")) {
            if (!f.is_array() || f.size() != 3) throw InputError("a fill is [row, col, value]");
            r.fills.push_back({f[0].get<int>(), f[1].get<int>(), f[2].get<int>()});
        }
        r.guess = detail::require(j, "guess").get<bool>();
        r.next = parse_sudoku_board(detail::require(j, "next").get<std::string>());
        return r;
    }
};

}  // namespace reflab
