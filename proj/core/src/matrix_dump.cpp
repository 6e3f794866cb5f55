#include <algorithm>
#include <string>
#include <vector>

#include "packrat/engine.hpp"
#include "packrat/utf8.hpp"

namespace packrat {

namespace {

std::size_t display_width(const std::string& s) {
	return static_cast<std::size_t>(std::count_if(s.begin(), s.end(),
		[](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string column_label(std::size_t pos) { return "C" + std::to_string(pos + 1); }

std::string success_cell(const std::string& value, Pos end) {
	return "(" + value + "," + column_label(end) + ")";
}

} // namespace

std::string dump_matrix(const ParseSession& session, const CellFormatter& value) {
	const Grammar& g = session.grammar();
	const std::size_t columns = session.columns();

	std::vector<std::vector<std::string>> rows;
	std::vector<std::string> labels;

	std::vector<std::string> header;
	for (std::size_t c = 0; c < columns; ++c)
		header.push_back(column_label(c));
	labels.emplace_back();
	rows.push_back(std::move(header));

	for (std::uint32_t r = 0; r < g.rule_count(); ++r) {
		const RuleId rule{r};
		std::vector<std::string> row;
		for (Pos p = 0; p < columns; ++p) {
			switch (session.cell_state(rule, p)) {
			case CellState::Unevaluated:
				row.emplace_back("·");
				break;
			case CellState::InProgress:
				row.emplace_back("?");
				break;
			case CellState::Done: {
				const Outcome o = *session.cell(rule, p);
				if (!o.success) {
					row.emplace_back("X");
					break;
				}
				std::optional<std::string> v;
				if (value)
					v = value(session.node(o.node));
				if (!v)
					v = std::to_string(o.end - p);
				row.push_back(success_cell(*v, o.end));
				break;
			}
			}
		}
		labels.push_back(g.name(rule));
		rows.push_back(std::move(row));
	}

	std::vector<std::string> chars;
	const auto input = session.input();
	for (Pos p = 0; p < columns; ++p) {
		if (!session.char_accessed(p))
			chars.emplace_back("·");
		else if (p < input.size())
			chars.push_back(success_cell(escape_char(input[p]), p + 1));
		else
			chars.emplace_back("X");
	}
	labels.emplace_back("CHAR");
	rows.push_back(std::move(chars));

	std::size_t label_width = 0;
	for (const auto& l : labels)
		label_width = std::max(label_width, display_width(l));
	std::vector<std::size_t> widths(columns, 0);
	for (const auto& row : rows)
		for (std::size_t c = 0; c < columns; ++c)
			widths[c] = std::max(widths[c], display_width(row[c]));

	std::string out;
	for (std::size_t i = 0; i < rows.size(); ++i) {
		std::string line = labels[i];
		line.append(label_width - display_width(labels[i]), ' ');
		for (std::size_t c = 0; c < columns; ++c) {
			line += "  ";
			line += rows[i][c];
			line.append(widths[c] - display_width(rows[i][c]), ' ');
		}
		while (!line.empty() && line.back() == ' ')
			line.pop_back();
		out += line;
		out += '\n';
	}
	return out;
}

} // namespace packrat
