package com.my_app;

public class Outer {
    static class Inner {
        native void go(char[] buf);

        void run(char[] buf) {
            go(buf);
        }
    }
}
