void Java_com_my_1app_Outer_00024Inner_go(JNIEnv *env, jobject self, jcharArray buf) {
    jchar *chars = env->GetCharArrayElements(buf, 0);
    jchar local[4];
    for (int i = 0; i < 8; i++) {
        local[i] = chars[i];
    }
}
