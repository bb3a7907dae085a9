// SPDX-License-Identifier: Apache-2.0
#pragma once

// Line-oriented text format for mc / imc / pimc files:
//
//   pimc                       # kind: mc | imc | pimc
//   params p q                 # pimc only
//   states s0 s1:alpha s3:alpha,beta
//   init s0
//   s0 -> s1 [0, 1]            # mc payload is a bare expression
//
// Expressions: expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)* ;
// factor := NUMBER | IDENT | '(' expr ')'. NUMBER is a decimal (`0.3`) or a
// fraction written without spaces (`3/10`); both are stored exactly.

#include "errors.hpp"
#include "expr.hpp"
#include "model.hpp"
#include "rational.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pimc
{

enum class model_kind { mc, imc, pimc };

inline const char* to_string( model_kind k )
{
    switch ( k ) {
        case model_kind::mc: return "mc";
        case model_kind::imc: return "imc";
        case model_kind::pimc: return "pimc";
    }
    return "?";
}

using any_model = std::variant< mc, imc, param_imc >;

namespace detail
{

enum class tok { ident, number, plus, minus, star, slash, lparen, rparen, lbracket, rbracket, comma, colon, arrow, end };

struct token
{
    tok kind;
    std::string text;
    std::size_t column;
};

inline bool ident_start( char c ) { return std::isalpha( static_cast< unsigned char >( c ) ) || c == '_'; }
inline bool ident_char( char c ) { return std::isalnum( static_cast< unsigned char >( c ) ) || c == '_' || c == '\''; }
inline bool digit( char c ) { return std::isdigit( static_cast< unsigned char >( c ) ) != 0; }

inline std::vector< token > tokenize( std::string_view text, std::size_t line, std::size_t base_column = 1 )
{
    std::vector< token > out;
    std::size_t i = 0;
    while ( i < text.size() ) {
        char c = text[ i ];
        std::size_t col = base_column + i;
        if ( std::isspace( static_cast< unsigned char >( c ) ) ) {
            ++i;
            continue;
        }
        if ( ident_start( c ) ) {
            std::size_t j = i;
            while ( j < text.size() && ident_char( text[ j ] ) )
                ++j;
            out.push_back( { tok::ident, std::string( text.substr( i, j - i ) ), col } );
            i = j;
            continue;
        }
        if ( digit( c ) || ( c == '.' && i + 1 < text.size() && digit( text[ i + 1 ] ) ) ) {
            std::size_t j = i;
            while ( j < text.size() && digit( text[ j ] ) )
                ++j;
            if ( j < text.size() && text[ j ] == '.' ) {
                ++j;
                while ( j < text.size() && digit( text[ j ] ) )
                    ++j;
            } else if ( j + 1 < text.size() && text[ j ] == '/' && digit( text[ j + 1 ] ) ) {
                ++j;
                while ( j < text.size() && digit( text[ j ] ) )
                    ++j;
            }
            out.push_back( { tok::number, std::string( text.substr( i, j - i ) ), col } );
            i = j;
            continue;
        }
        if ( c == '-' && i + 1 < text.size() && text[ i + 1 ] == '>' ) {
            out.push_back( { tok::arrow, "->", col } );
            i += 2;
            continue;
        }
        tok k;
        switch ( c ) {
            case '+': k = tok::plus; break;
            case '-': k = tok::minus; break;
            case '*': k = tok::star; break;
            case '/': k = tok::slash; break;
            case '(': k = tok::lparen; break;
            case ')': k = tok::rparen; break;
            case '[': k = tok::lbracket; break;
            case ']': k = tok::rbracket; break;
            case ',': k = tok::comma; break;
            case ':': k = tok::colon; break;
            default: throw parse_error( std::string( "unexpected character '" ) + c + "'", line, col );
        }
        out.push_back( { k, std::string( 1, c ), col } );
        ++i;
    }
    out.push_back( { tok::end, "", base_column + text.size() } );
    return out;
}

// Called for every identifier inside an expression; throws to reject it.
using ident_check = std::function< void( const token& ) >;

class expr_parser
{
    const std::vector< token >& _toks;
    std::size_t _pos;
    std::size_t _line;
    ident_check _check;

public:
    expr_parser( const std::vector< token >& toks, std::size_t pos, std::size_t line, ident_check check )
        : _toks{ toks }, _pos{ pos }, _line{ line }, _check{ std::move( check ) } {}

    [[nodiscard]] std::size_t position() const { return _pos; }

    param_expr expression()
    {
        param_expr acc = term();
        while ( peek().kind == tok::plus || peek().kind == tok::minus ) {
            auto op = next().kind == tok::plus ? arith_op::add : arith_op::sub;
            acc = param_expr::binary( op, acc, term() );
        }
        return acc;
    }

private:
    const token& peek() const { return _toks[ _pos ]; }
    const token& next() { return _toks[ _pos++ ]; }

    param_expr term()
    {
        param_expr acc = factor();
        while ( peek().kind == tok::star || peek().kind == tok::slash ) {
            auto op = next().kind == tok::star ? arith_op::mul : arith_op::div;
            acc = param_expr::binary( op, acc, factor() );
        }
        return acc;
    }

    param_expr factor()
    {
        const token& t = next();
        switch ( t.kind ) {
            case tok::number: {
                auto r = parse_rational( t.text );
                if ( !r )
                    throw parse_error( "malformed number " + t.text, _line, t.column );
                return param_expr::constant( *r );
            }
            case tok::ident:
                if ( _check )
                    _check( t );
                return param_expr::parameter( t.text );
            case tok::lparen: {
                param_expr inner = expression();
                if ( peek().kind != tok::rparen )
                    throw parse_error( "expected ')'", _line, peek().column );
                next();
                return inner;
            }
            case tok::end:
                throw parse_error( "unexpected end of expression", _line, t.column );
            default:
                throw parse_error( "unexpected '" + t.text + "' in expression", _line, t.column );
        }
    }
};

} // namespace detail

inline param_expr parse_expr( std::string_view text )
{
    auto toks = detail::tokenize( text, 1 );
    if ( toks.front().kind == detail::tok::end )
        throw parse_error( "empty expression", 1, 1 );
    detail::expr_parser p( toks, 0, 1, nullptr );
    param_expr e = p.expression();
    if ( toks[ p.position() ].kind != detail::tok::end )
        throw parse_error( "trailing input '" + toks[ p.position() ].text + "'", 1, toks[ p.position() ].column );
    return e;
}

inline any_model parse_model( std::string_view text )
{
    using detail::tok;

    std::optional< model_kind > kind;
    std::set< std::string > params;
    std::vector< std::string > names;
    std::vector< label > labels;
    std::optional< state_index > initial;
    std::vector< std::map< state_index, param_interval > > rows;
    std::size_t last_line = 1;

    auto state_of = [ & ]( const detail::token& t, std::size_t line ) -> state_index {
        for ( state_index i = 0; i < names.size(); ++i )
            if ( names[ i ] == t.text )
                return i;
        throw parse_error( "undeclared state " + t.text, line, t.column );
    };

    std::size_t line_no = 0;
    std::size_t start = 0;
    while ( start <= text.size() ) {
        auto end = text.find( '\n', start );
        if ( end == std::string_view::npos )
            end = text.size();
        std::string_view line = text.substr( start, end - start );
        start = end + 1;
        ++line_no;
        if ( auto hash = line.find( '#' ); hash != std::string_view::npos )
            line = line.substr( 0, hash );
        if ( !line.empty() && line.back() == '\r' )
            line.remove_suffix( 1 );

        auto toks = detail::tokenize( line, line_no );
        if ( toks.front().kind == tok::end ) {
            if ( end == text.size() )
                break;
            continue;
        }
        last_line = line_no;
        const auto& head = toks.front();

        if ( !kind ) {
            if ( head.kind == tok::ident && ( head.text == "mc" || head.text == "imc" || head.text == "pimc" ) ) {
                kind = head.text == "mc" ? model_kind::mc : head.text == "imc" ? model_kind::imc : model_kind::pimc;
                if ( toks[ 1 ].kind != tok::end )
                    throw parse_error( "unexpected '" + toks[ 1 ].text + "' after model kind", line_no, toks[ 1 ].column );
                continue;
            }
            throw parse_error( "expected model kind (mc, imc or pimc)", line_no, head.column );
        }

        if ( head.kind == tok::ident && head.text == "params" && toks[ 1 ].kind != tok::arrow ) {
            if ( *kind != model_kind::pimc )
                throw parse_error( "parameters are only allowed in pimc files", line_no, head.column );
            for ( std::size_t i = 1; toks[ i ].kind != tok::end; ++i ) {
                if ( toks[ i ].kind != tok::ident )
                    throw parse_error( "expected parameter name", line_no, toks[ i ].column );
                if ( !params.insert( toks[ i ].text ).second )
                    throw parse_error( "duplicate parameter " + toks[ i ].text, line_no, toks[ i ].column );
            }
            continue;
        }

        if ( head.kind == tok::ident && head.text == "states" && toks[ 1 ].kind != tok::arrow ) {
            std::size_t i = 1;
            if ( toks[ i ].kind == tok::end )
                throw parse_error( "expected state declarations", line_no, toks[ i ].column );
            while ( toks[ i ].kind != tok::end ) {
                if ( toks[ i ].kind != tok::ident )
                    throw parse_error( "expected state name", line_no, toks[ i ].column );
                const auto& st = toks[ i++ ];
                for ( const auto& n : names )
                    if ( n == st.text )
                        throw parse_error( "duplicate state " + st.text, line_no, st.column );
                label l;
                if ( toks[ i ].kind == tok::colon ) {
                    ++i;
                    while ( true ) {
                        if ( toks[ i ].kind != tok::ident )
                            throw parse_error( "expected proposition name", line_no, toks[ i ].column );
                        l.insert( toks[ i++ ].text );
                        if ( toks[ i ].kind != tok::comma )
                            break;
                        ++i;
                    }
                }
                names.push_back( st.text );
                labels.push_back( std::move( l ) );
                rows.emplace_back();
            }
            continue;
        }

        if ( head.kind == tok::ident && head.text == "init" && toks[ 1 ].kind != tok::arrow ) {
            if ( initial )
                throw parse_error( "duplicate init declaration", line_no, head.column );
            if ( toks[ 1 ].kind != tok::ident || toks[ 2 ].kind != tok::end )
                throw parse_error( "expected: init <state>", line_no, toks[ 1 ].column );
            initial = state_of( toks[ 1 ], line_no );
            continue;
        }

        // Transition line.
        if ( head.kind != tok::ident )
            throw parse_error( "expected a declaration or transition", line_no, head.column );
        if ( toks[ 1 ].kind != tok::arrow )
            throw parse_error( "expected '->'", line_no, toks[ 1 ].column );
        if ( toks[ 2 ].kind != tok::ident )
            throw parse_error( "expected target state", line_no, toks[ 2 ].column );
        state_index src = state_of( head, line_no );
        state_index dst = state_of( toks[ 2 ], line_no );
        if ( rows[ src ].count( dst ) )
            throw parse_error( "duplicate transition " + head.text + " -> " + toks[ 2 ].text, line_no, head.column );

        model_kind k = *kind;
        detail::ident_check check = [ &, line_no, k ]( const detail::token& t ) {
            if ( k != model_kind::pimc )
                throw parse_error( "parameter " + t.text + " in a " + std::string( to_string( k ) ) + " file", line_no, t.column );
            if ( !params.count( t.text ) )
                throw parse_error( "undeclared parameter " + t.text, line_no, t.column );
        };

        std::size_t pos = 3;
        param_interval payload;
        if ( k == model_kind::mc ) {
            if ( toks[ pos ].kind == tok::lbracket )
                throw parse_error( "interval payload in an mc file", line_no, toks[ pos ].column );
            detail::expr_parser ep( toks, pos, line_no, check );
            param_expr e = ep.expression();
            pos = ep.position();
            payload = { e, e };
        } else {
            if ( toks[ pos ].kind != tok::lbracket )
                throw parse_error( "expected '[' (interval payload)", line_no, toks[ pos ].column );
            detail::expr_parser lo( toks, pos + 1, line_no, check );
            param_expr a = lo.expression();
            pos = lo.position();
            if ( toks[ pos ].kind != tok::comma )
                throw parse_error( "expected ','", line_no, toks[ pos ].column );
            detail::expr_parser hi( toks, pos + 1, line_no, check );
            param_expr b = hi.expression();
            pos = hi.position();
            if ( toks[ pos ].kind != tok::rbracket )
                throw parse_error( "expected ']'", line_no, toks[ pos ].column );
            ++pos;
            payload = { a, b };
        }
        if ( toks[ pos ].kind != tok::end )
            throw parse_error( "trailing input '" + toks[ pos ].text + "'", line_no, toks[ pos ].column );
        rows[ src ][ dst ] = payload;
    }

    if ( !kind )
        throw parse_error( "empty model file", last_line, 1 );
    if ( names.empty() )
        throw parse_error( "no states declared", last_line, 1 );
    if ( !initial )
        throw parse_error( "missing init declaration", last_line, 1 );

    switch ( *kind ) {
        case model_kind::mc: {
            std::vector< mc::row_type > out( names.size() );
            for ( state_index s = 0; s < names.size(); ++s )
                for ( const auto& [ d, i ] : rows[ s ] )
                    out[ s ][ d ] = i.lo.evaluate( {} );
            return mc( names, labels, *initial, std::move( out ) );
        }
        case model_kind::imc: {
            std::vector< imc::row_type > out( names.size() );
            for ( state_index s = 0; s < names.size(); ++s )
                for ( const auto& [ d, i ] : rows[ s ] )
                    out[ s ][ d ] = i.instantiate( {} );
            return imc( names, labels, *initial, std::move( out ) );
        }
        case model_kind::pimc:
            return param_imc( names, labels, *initial, std::move( rows ), params );
    }
    throw error( "unreachable" );
}

namespace detail
{

template < typename Payload >
std::string emit_header( const chain< Payload >& m, model_kind kind, const std::set< std::string >& params )
{
    std::ostringstream os;
    os << to_string( kind ) << "\n";
    if ( !params.empty() ) {
        os << "params";
        for ( const auto& p : params )
            os << " " << p;
        os << "\n";
    }
    os << "states";
    for ( state_index s = 0; s < m.state_count(); ++s ) {
        os << " " << m.name( s );
        const auto& l = m.labels_of( s );
        if ( !l.empty() ) {
            os << ":";
            bool first = true;
            for ( const auto& p : l ) {
                os << ( first ? "" : "," ) << p;
                first = false;
            }
        }
    }
    os << "\ninit " << m.name( m.initial() ) << "\n";
    return os.str();
}

} // namespace detail

inline std::string emit_model( const mc& m )
{
    std::string out = detail::emit_header( m, model_kind::mc, {} );
    for ( state_index s = 0; s < m.state_count(); ++s )
        for ( const auto& [ d, p ] : m.row( s ) )
            out += m.name( s ) + " -> " + m.name( d ) + " " + param_expr( p ).to_string() + "\n";
    return out;
}

inline std::string emit_model( const imc& m )
{
    std::string out = detail::emit_header( m, model_kind::imc, {} );
    for ( state_index s = 0; s < m.state_count(); ++s )
        for ( const auto& [ d, i ] : m.row( s ) ) {
            std::string lo = i.empty ? "1" : to_string( i.lo );
            std::string hi = i.empty ? "0" : to_string( i.hi );
            out += m.name( s ) + " -> " + m.name( d ) + " [" + lo + ", " + hi + "]\n";
        }
    return out;
}

inline std::string emit_model( const param_imc& m )
{
    std::string out = detail::emit_header( m, model_kind::pimc, m.params() );
    for ( state_index s = 0; s < m.state_count(); ++s )
        for ( const auto& [ d, i ] : m.row( s ) )
            out += m.name( s ) + " -> " + m.name( d ) + " [" + i.lo.to_string() + ", " + i.hi.to_string() + "]\n";
    return out;
}

inline std::string emit_model( const any_model& m )
{
    return std::visit( []( const auto& x ) { return emit_model( x ); }, m );
}

inline std::string read_text_file( const std::string& path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw error( "cannot open " + path );
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline any_model read_model_file( const std::string& path )
{
    return parse_model( read_text_file( path ) );
}

// Any model kind viewed as a pIMC (an mc becomes point intervals).
inline param_imc as_param_imc( const any_model& m )
{
    if ( const auto* a = std::get_if< mc >( &m ) )
        return to_param_imc( *a );
    if ( const auto* b = std::get_if< imc >( &m ) )
        return to_param_imc( *b );
    return std::get< param_imc >( m );
}

} // namespace pimc
