// SPDX-License-Identifier: Apache-2.0
#include "test_support.hpp"

#include <pimc/encoder.hpp>
#include <pimc/smtlib.hpp>
#include <pimc/solver.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace pimc;
using namespace pimc::testing;

namespace
{

std::string slurp( const std::string& path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw std::runtime_error( "cannot open " + path );
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

model_value value_of( const std::string& text )
{
    auto es = parse_sexprs( text );
    if ( es.size() != 1 )
        throw std::runtime_error( "expected one expression" );
    return read_model_value( es[ 0 ] );
}

bool contains( const std::string& hay, const std::string& needle ) { return hay.find( needle ) != std::string::npos; }

} // namespace

TEST( SmtNumber, Forms )
{
    EXPECT_EQ( smt_number( R( "0" ) ), "0" );
    EXPECT_EQ( smt_number( R( "3" ) ), "3" );
    EXPECT_EQ( smt_number( R( "3/10" ) ), "(/ 3 10)" );
    EXPECT_EQ( smt_number( R( "-2" ) ), "(- 2)" );
    EXPECT_EQ( smt_number( R( "-1/4" ) ), "(- (/ 1 4))" );
}

TEST( SmtTerm, Expressions )
{
    auto x = term::var( "x" ), y = term::var( "y" );
    EXPECT_EQ( smt_term( x + y ), "(+ x y)" );
    EXPECT_EQ( smt_term( term( 1 ) - x ), "(- 1 x)" );
    EXPECT_EQ( smt_term( x * y ), "(* x y)" );
    EXPECT_EQ( smt_term( x / term( 2 ) ), "(/ x 2)" );
    EXPECT_EQ( smt_formula( le( x, term( R( "1/2" ) ) ) ), "(<= x (/ 1 2))" );
    EXPECT_EQ( smt_formula( ne( x, y ) ), "(not (= x y))" );
}

TEST( SmtFormula, IffAndImplication )
{
    auto b = formula::bvar( "b" );
    auto f = formula::iff( b, eq( term::var( "x" ), term( 1 ) ) );
    EXPECT_EQ( smt_formula( f ), "(= b (= x 1))" );
    EXPECT_EQ( smt_formula( formula::implies( b, gt( term::var( "x" ), term( 0 ) ) ) ), "(=> b (> x 0))" );
}

TEST( EmitSmtlib, DeclarationsDomainsAndCounters )
{
    csp c;
    c.declare( "b", var_sort::boolean );
    c.declare( "x", var_sort::real, R( "0" ), R( "1" ) );
    c.declare( "omega_0", var_sort::counter, R( "0" ), R( "3" ) );
    c.add( formula::bvar( "b" ), 1, "first" );
    c.add( ge( term::var( "omega_0" ), term( 1 ) ), 0, "second" );
    auto s = emit_smtlib( c );
    EXPECT_EQ( s.declarations, 3u );
    EXPECT_EQ( s.assertions, 5u ); // two domains, one counter rule, two constraints
    EXPECT_TRUE( contains( s.text, "(set-logic QF_NRA)\n" ) );
    EXPECT_TRUE( contains( s.text, "(declare-const b Bool)\n" ) );
    EXPECT_TRUE( contains( s.text, "(declare-const omega_0 Real)\n" ) );
    EXPECT_TRUE( contains( s.text, "(assert (and (<= 0 omega_0) (<= omega_0 3)))\n" ) );
    EXPECT_TRUE( contains( s.text, "(assert (=> (< omega_0 1) (= omega_0 0)))\n" ) );
    EXPECT_TRUE( contains( s.text, "; (1) first\n(assert b)\n" ) );
    EXPECT_TRUE( contains( s.text, "; second\n(assert (>= omega_0 1))\n" ) );
    EXPECT_EQ( s.text.substr( s.text.size() - 24 ), "(check-sat)\n(get-model)\n" );
}

TEST( EmitSmtlib, Deterministic )
{
    auto p = load_pimc( "fig5.pimc" );
    for ( int k = 0; k < 3; ++k ) {
        auto a = emit_smtlib( encode_quant_reach( p, { "beta" } ).problem ).text;
        auto b = emit_smtlib( encode_quant_reach( load_pimc( "fig5.pimc" ), { "beta" } ).problem ).text;
        EXPECT_EQ( a, b );
    }
}

TEST( EmitSmtlib, GoldenScripts )
{
    auto p = load_pimc( "fig5.pimc" );
    EXPECT_EQ( emit_smtlib( encode_consistency( p ).problem ).text, slurp( golden_path( "fig5_consistency.smt2" ) ) );

    auto q = encode_qual_reach( p );
    add_goal( q, goal::exists_reach( { "beta" } ) );
    EXPECT_EQ( emit_smtlib( q.problem ).text, slurp( golden_path( "fig5_qual_reach_exists_beta.smt2" ) ) );

    EXPECT_EQ( emit_smtlib( encode_reach_aux( p, { "beta" } ).problem ).text,
               slurp( golden_path( "fig5_reach_aux_beta.smt2" ) ) );

    auto r = encode_quant_reach( p, { "beta" } );
    add_goal( r, goal::prob( { "beta" }, cmp_op::ge, R( "3/10" ) ) );
    EXPECT_EQ( emit_smtlib( r.problem ).text, slurp( golden_path( "fig5_quant_reach_beta_ge_0.3.smt2" ) ) );
}

TEST( EmitSmtlib, AssertionCountMatchesText )
{
    auto p = load_pimc( "fig5.pimc" );
    auto s = emit_smtlib( encode_quant_reach( p, { "beta" } ).problem );
    std::size_t n = 0;
    for ( std::size_t at = s.text.find( "(assert " ); at != std::string::npos; at = s.text.find( "(assert ", at + 1 ) )
        ++n;
    EXPECT_EQ( n, s.assertions );
}

TEST( Sexpr, Parsing )
{
    auto es = parse_sexprs( "(a (b c) 12) x ; comment\n(|quoted sym| \"str\")" );
    ASSERT_EQ( es.size(), 3u );
    EXPECT_TRUE( es[ 0 ].head( "a" ) );
    ASSERT_EQ( es[ 0 ].items.size(), 3u );
    EXPECT_TRUE( es[ 0 ].items[ 1 ].head( "b" ) );
    EXPECT_TRUE( es[ 0 ].items[ 2 ].is( "12" ) );
    EXPECT_TRUE( es[ 1 ].is( "x" ) );
    EXPECT_FALSE( es[ 2 ].atom );
    EXPECT_THROW( parse_sexprs( "(a b" ), error );
    EXPECT_THROW( parse_sexprs( ")" ), error );
}

TEST( ModelValue, NumbersAndBooleans )
{
    EXPECT_TRUE( value_of( "true" ).is_bool );
    EXPECT_TRUE( value_of( "true" ).boolean );
    EXPECT_FALSE( value_of( "false" ).boolean );
    EXPECT_EQ( value_of( "3" ).number, R( "3" ) );
    EXPECT_EQ( value_of( "0.25" ).number, R( "1/4" ) );
    EXPECT_EQ( value_of( "(/ 7.0 10.0)" ).number, R( "7/10" ) );
    EXPECT_EQ( value_of( "(/ 3 8)" ).number, R( "3/8" ) );
    EXPECT_EQ( value_of( "(- 2)" ).number, R( "-2" ) );
    EXPECT_EQ( value_of( "(- (/ 1 3))" ).number, R( "-1/3" ) );
    EXPECT_FALSE( value_of( "(/ 1 3)" ).approximate );
    EXPECT_THROW( value_of( "(foo 1)" ), error );
}

TEST( ModelValue, AlgebraicRoots )
{
    // roots of x^2 - 2, numbered from the smallest
    auto neg = value_of( "(root-obj (+ (^ x 2) (- 2)) 1)" );
    auto pos = value_of( "(root-obj (+ (^ x 2) (- 2)) 2)" );
    EXPECT_TRUE( pos.approximate );
    const rational eps( 1, 1L << 30 );
    EXPECT_LT( abs( pos.number * pos.number - 2 ), eps );
    EXPECT_GT( pos.number, 0 );
    EXPECT_LT( abs( neg.number + pos.number ), eps );
    auto half = value_of( "(root-obj (+ (* 4 (^ x 2)) (- 1)) 2)" );
    EXPECT_LT( abs( half.number - R( "1/2" ) ), eps );
    EXPECT_THROW( value_of( "(root-obj (+ (^ x 2) 1) 1)" ), error );
}

TEST( SolverOutput, Verdicts )
{
    EXPECT_EQ( parse_solver_output( "unsat\n" ).status, solver_status::unsat );
    EXPECT_EQ( parse_solver_output( "unknown\n" ).status, solver_status::unknown );
    EXPECT_EQ( parse_solver_output( "\n  timeout\n" ).status, solver_status::timeout );
    EXPECT_EQ( parse_solver_output( "" ).status, solver_status::solver_error );
    EXPECT_EQ( parse_solver_output( "segfault\n" ).status, solver_status::solver_error );
    EXPECT_EQ( parse_solver_output( "sat\n" ).status, solver_status::solver_error );
    EXPECT_EQ( parse_solver_output( "sat\n(error \"no model\")\n" ).status, solver_status::solver_error );
}

TEST( SolverOutput, Models )
{
    auto v = parse_solver_output( "sat\n(\n  (define-fun rho_0 () Bool true)\n"
                                  "  (define-fun theta_0_1 () Real (/ 3.0 10.0))\n"
                                  "  (define-fun helper ((x Real)) Real x)\n"
                                  "  (define-fun pi_0 () Real (root-obj (+ (^ x 2) (- 2)) 2))\n)\n" );
    ASSERT_EQ( v.status, solver_status::sat );
    EXPECT_TRUE( v.approximate );
    EXPECT_EQ( v.model.size(), 3u );
    EXPECT_TRUE( v.model.at( "rho_0" ).boolean );
    EXPECT_EQ( v.model.at( "theta_0_1" ).number, R( "3/10" ) );

    auto old = parse_solver_output( "sat\n(model (define-fun x () Real 0.5) (define-fun b () Bool false))\n" );
    ASSERT_EQ( old.status, solver_status::sat );
    EXPECT_FALSE( old.approximate );
    EXPECT_EQ( old.model.at( "x" ).number, R( "1/2" ) );
    EXPECT_FALSE( old.model.at( "b" ).boolean );

    auto broken = parse_solver_output( "sat\n((define-fun x () Real (mystery 1)))\n" );
    EXPECT_EQ( broken.status, solver_status::solver_error );
    EXPECT_TRUE( broken.model.empty() );
}

TEST( SolverOutput, CheckModel )
{
    csp c;
    c.declare( "b", var_sort::boolean );
    c.declare( "x", var_sort::real, R( "0" ), R( "1" ) );
    c.declare( "omega_0", var_sort::counter, R( "0" ), R( "2" ) );
    auto ok = parse_solver_output( "sat\n((define-fun b () Bool true)(define-fun x () Real 0.5)"
                                   "(define-fun omega_0 () Real 2.0))\n" );
    EXPECT_FALSE( check_model( c, ok ) );
    auto missing = parse_solver_output( "sat\n((define-fun b () Bool true)(define-fun x () Real 0.5))\n" );
    EXPECT_TRUE( check_model( c, missing ) );
    auto sort = parse_solver_output( "sat\n((define-fun b () Real 1)(define-fun x () Real 0.5)"
                                     "(define-fun omega_0 () Real 2.0))\n" );
    EXPECT_TRUE( check_model( c, sort ) );
    auto range = parse_solver_output( "sat\n((define-fun b () Bool true)(define-fun x () Real 1.5)"
                                      "(define-fun omega_0 () Real 2.0))\n" );
    EXPECT_TRUE( check_model( c, range ) );
    auto gap = parse_solver_output( "sat\n((define-fun b () Bool true)(define-fun x () Real 0.5)"
                                    "(define-fun omega_0 () Real 0.5))\n" );
    EXPECT_TRUE( check_model( c, gap ) );
}

TEST( SolverCommand, Placeholders )
{
    EXPECT_EQ( solver_command_line( "z3 -smt2 {file}", "/tmp/a b.smt2" ), "z3 -smt2 '/tmp/a b.smt2'" );
    EXPECT_EQ( solver_command_line( "cvc5", "/tmp/x.smt2" ), "cvc5 '/tmp/x.smt2'" );
    EXPECT_EQ( solver_command_line( "cat {file} {file}", "{file}" ), "cat '{file}' '{file}'" );
    EXPECT_EQ( shell_quote( "it's" ), "'it'\\''s'" );
}
